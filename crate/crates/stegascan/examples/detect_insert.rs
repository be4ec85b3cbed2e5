//! Scan an image for an LSB insert and localize it.
//!
//! With no argument the example builds its own stego image first, so the
//! detected box can be checked against the ground truth:
//!
//! ```bash
//! cargo run --example detect_insert            # self-made stego image
//! cargo run --example detect_insert -- img.png # scan a file
//! ```

use stegascan::{
    compare_truth, detect, embed_lsb, load_image, localize, random_payload, seeded_region,
    shapes_image, AhpParams,
};

fn main() -> stegascan::Result<()> {
    let out = std::path::Path::new("target/example-output/detect_insert");
    std::fs::create_dir_all(out).expect("create output dir");
    let params = AhpParams::default();

    let (grid, record) = match std::env::args().nth(1) {
        Some(path) => (load_image(path)?, None),
        None => {
            let container = shapes_image(640, 480, 11);
            let region = seeded_region(640, 480, 235, 235, 11)?;
            let payload = random_payload(region.area(), 12);
            let (stego, record) = embed_lsb(&container, &payload, &region)?;
            println!(
                "embedded a random payload at rows {}..={}, cols {}..={}",
                region.top, region.bottom, region.left, region.right
            );
            (stego, Some(record))
        }
    };

    let matrix = detect(&grid, &params)?;
    let loc = localize(&matrix);
    stegascan::cli::write_mask_png(&matrix, &out.join("mask.png"))?;

    println!("positives: {}", matrix.count_positives());
    println!("insert found: {}", loc.insert_found);
    if loc.insert_found {
        let b = loc.bounding_box;
        println!(
            "box: rows {}..={}, cols {}..={} (inside density {:.3}, outside {:.4}, contrast {:.1})",
            b.top, b.bottom, b.left, b.right,
            loc.report.inside_density, loc.report.outside_density, loc.report.contrast
        );
    }
    if let Some(record) = record {
        let metrics = compare_truth(&matrix, &record)?;
        println!(
            "against ground truth: precision {:.3}, recall {:.3}, edge errors {:?}",
            metrics.precision, metrics.recall, metrics.edge_errors
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}
