//! Lossless cloud storage for demonstrations. Unlike the render crate's
//! export format (float positions, 8-bit colors), frames must survive a save
//! and reload bit-for-bit, so positions are stored as doubles and colors as
//! the raw f32 channels.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use inhand_geometry::Vec3;
use inhand_render::PointCloud;

use crate::PipelineError;

const HEADER_PROPS: [&str; 6] = [
    "double x",
    "double y",
    "double z",
    "float red",
    "float green",
    "float blue",
];

pub(crate) fn write_frame_cloud(path: &Path, cloud: &PointCloud) -> Result<(), PipelineError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    write!(
        w,
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\n",
        cloud.len()
    )?;
    for prop in HEADER_PROPS {
        writeln!(w, "property {prop}")?;
    }
    w.write_all(b"end_header\n")?;
    for (p, c) in cloud.positions().iter().zip(cloud.colors()) {
        w.write_all(&p.x.to_le_bytes())?;
        w.write_all(&p.y.to_le_bytes())?;
        w.write_all(&p.z.to_le_bytes())?;
        for ch in c {
            w.write_all(&ch.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn read_frame_cloud(path: &Path) -> Result<PointCloud, PipelineError> {
    let bad = |msg: String| {
        PipelineError::Validation(format!("{}: {msg}", path.display()))
    };
    let mut r = BufReader::new(std::fs::File::open(path)?);

    let mut line = String::new();
    let read_line = |r: &mut BufReader<std::fs::File>, line: &mut String| {
        line.clear();
        r.read_line(line).map_err(PipelineError::Io).and_then(|n| {
            if n == 0 {
                Err(bad("truncated header".into()))
            } else {
                Ok(())
            }
        })
    };

    read_line(&mut r, &mut line)?;
    if line.trim_end() != "ply" {
        return Err(bad("missing 'ply' magic line".into()));
    }
    read_line(&mut r, &mut line)?;
    if line.trim_end() != "format binary_little_endian 1.0" {
        return Err(bad(format!("unsupported format line '{}'", line.trim_end())));
    }
    read_line(&mut r, &mut line)?;
    let count: usize = line
        .trim_end()
        .strip_prefix("element vertex ")
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| bad(format!("bad vertex element '{}'", line.trim_end())))?;
    for prop in HEADER_PROPS {
        read_line(&mut r, &mut line)?;
        if line.trim_end() != format!("property {prop}") {
            return Err(bad(format!("expected 'property {prop}'")));
        }
    }
    read_line(&mut r, &mut line)?;
    if line.trim_end() != "end_header" {
        return Err(bad("missing end_header".into()));
    }

    let mut positions = Vec::with_capacity(count);
    let mut colors = Vec::with_capacity(count);
    let mut pos = [0u8; 24];
    let mut col = [0u8; 12];
    for _ in 0..count {
        r.read_exact(&mut pos)
            .and_then(|_| r.read_exact(&mut col))
            .map_err(|_| bad("truncated vertex data".into()))?;
        let f64_at = |i: usize| f64::from_le_bytes(pos[8 * i..8 * i + 8].try_into().unwrap());
        let f32_at = |i: usize| f32::from_le_bytes(col[4 * i..4 * i + 4].try_into().unwrap());
        positions.push(Vec3::new(f64_at(0), f64_at(1), f64_at(2)));
        colors.push([f32_at(0), f32_at(1), f32_at(2)]);
    }
    let mut tail = [0u8; 1];
    if r.read(&mut tail)? != 0 {
        return Err(bad("trailing bytes after vertex data".into()));
    }
    Ok(PointCloud::new(positions, colors)?)
}
