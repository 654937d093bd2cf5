use std::path::Path;

use rpcodec::codec::encode_frame;
use rpcodec::io::{read_image, write_container};
use rpcodec::CodecConfig;

use crate::error::CliError;

pub fn run(input: &Path, output: &Path, qp: u8, loop_filter: bool) -> Result<(), CliError> {
    let frame = read_image(input)?;
    let cfg = CodecConfig::new(qp).map_err(CliError::usage_if_param)?.with_loop_filter(loop_filter);
    let out = encode_frame(&frame, &cfg)?;
    let bytes = write_container(&out.image);
    std::fs::write(output, &bytes)?;
    let pixels = frame.width() as f64 * frame.height() as f64;
    println!(
        "{}x{} qp {qp}: {} bytes ({} payload), {:.4} bpp, {} CUs",
        frame.width(),
        frame.height(),
        bytes.len(),
        out.stats.payload_bytes,
        bytes.len() as f64 * 8.0 / pixels,
        out.stats.leaves
    );
    Ok(())
}
