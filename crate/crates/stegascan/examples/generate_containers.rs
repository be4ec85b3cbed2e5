//! Generate the two synthetic container images used throughout the toolkit:
//! a left-to-right blue gradient and a seeded arrangement of flat shapes.
//!
//! ```bash
//! cargo run --example generate_containers
//! ```

use stegascan::{gradient_image, shapes_image};

fn main() -> stegascan::Result<()> {
    let out = std::path::Path::new("target/example-output/generate_containers");
    std::fs::create_dir_all(out).expect("create output dir");

    let gradient = gradient_image(640, 480);
    gradient.save_png(out.join("gradient.png"))?;
    println!(
        "gradient.png: {}x{}, blue ramps 0..=255 left to right",
        gradient.width(),
        gradient.height()
    );

    let shapes = shapes_image(640, 480, 7);
    shapes.save_png(out.join("shapes.png"))?;
    println!("shapes.png: flat geometric shapes, deterministic for seed 7");

    println!("wrote {}", out.display());
    Ok(())
}
