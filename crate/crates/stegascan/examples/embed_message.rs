//! Hide a text message in the blue-channel LSBs of a rectangular region,
//! then read it back and inspect the ground-truth record.
//!
//! ```bash
//! cargo run --example embed_message
//! ```

use stegascan::{
    bits_to_text, embed_lsb, extract_lsb, gradient_image, seeded_region, text_to_bits,
};

fn main() -> stegascan::Result<()> {
    let out = std::path::Path::new("target/example-output/embed_message");
    std::fs::create_dir_all(out).expect("create output dir");

    let container = gradient_image(640, 480);
    let message = "Съешь же ещё этих мягких французских булок, да выпей чаю.";
    let payload = text_to_bits(message);

    // A region in the middle third of the image, large enough for the payload.
    let side = (payload.len() as f64).sqrt().ceil() as usize;
    let region = seeded_region(container.width(), container.height(), side, side, 42)?;
    let (stego, record) = embed_lsb(&container, &payload, &region)?;

    stego.save_png(out.join("stego.png"))?;
    std::fs::write(out.join("record.json"), record.to_json()).expect("write record");

    println!("message: {} bits over a {}x{} region", payload.len(), side, side);
    println!(
        "written cells: {}, actually flipped: {} (change rate {:.5})",
        record.written_mask().count_ones(),
        record.flipped_mask().count_ones(),
        record.change_rate()
    );

    let recovered = bits_to_text(&extract_lsb(&stego, &region, payload.len()))?;
    assert_eq!(recovered, message);
    println!("recovered message: {recovered}");
    println!("wrote {}", out.display());
    Ok(())
}
