use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use inhand_geometry::Vec3;

use crate::cloud::PointCloud;
use crate::error::RenderError;

/// Writes a cloud as binary little-endian PLY with `float x/y/z` and
/// `uchar red/green/blue` per vertex.
pub fn write_ply(path: &Path, cloud: &PointCloud) -> Result<(), RenderError> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    write!(
        w,
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\n\
         property float x\nproperty float y\nproperty float z\n\
         property uchar red\nproperty uchar green\nproperty uchar blue\n\
         end_header\n",
        cloud.len()
    )?;
    for (p, c) in cloud.positions().iter().zip(cloud.colors()) {
        w.write_all(&(p.x as f32).to_le_bytes())?;
        w.write_all(&(p.y as f32).to_le_bytes())?;
        w.write_all(&(p.z as f32).to_le_bytes())?;
        for ch in c {
            w.write_all(&[(ch * 255.0).round().clamp(0.0, 255.0) as u8])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a PLY file written by [`write_ply`].
///
/// The reader is deliberately strict: it accepts exactly the vertex layout
/// this crate emits (binary little-endian, `float x/y/z` then
/// `uchar red/green/blue`) and reports a descriptive error for anything else,
/// rather than silently misinterpreting unknown layouts.
pub fn read_ply(path: &Path) -> Result<PointCloud, RenderError> {
    let file = std::fs::File::open(path)?;
    let mut r = BufReader::new(file);

    let mut vertex_count: Option<usize> = None;
    let mut properties: Vec<String> = Vec::new();
    let mut line = String::new();

    r.read_line(&mut line)?;
    if line.trim_end() != "ply" {
        return Err(RenderError::Ply("missing 'ply' magic line".into()));
    }
    loop {
        line.clear();
        if r.read_line(&mut line)? == 0 {
            return Err(RenderError::Ply("header ended before end_header".into()));
        }
        let t = line.trim_end();
        if t == "end_header" {
            break;
        }
        if t.starts_with("comment") {
            continue;
        }
        if let Some(rest) = t.strip_prefix("format ") {
            if rest != "binary_little_endian 1.0" {
                return Err(RenderError::Ply(format!("unsupported format '{rest}'")));
            }
        } else if let Some(rest) = t.strip_prefix("element ") {
            let mut parts = rest.split_whitespace();
            match (parts.next(), parts.next()) {
                (Some("vertex"), Some(n)) => {
                    vertex_count = Some(
                        n.parse()
                            .map_err(|_| RenderError::Ply(format!("bad vertex count '{n}'")))?,
                    );
                }
                _ => return Err(RenderError::Ply(format!("unsupported element '{rest}'"))),
            }
        } else if let Some(rest) = t.strip_prefix("property ") {
            properties.push(rest.to_string());
        } else {
            return Err(RenderError::Ply(format!("unrecognized header line '{t}'")));
        }
    }

    let expected = [
        "float x",
        "float y",
        "float z",
        "uchar red",
        "uchar green",
        "uchar blue",
    ];
    if properties != expected {
        return Err(RenderError::Ply(format!(
            "unsupported vertex layout {properties:?}; expected {expected:?}"
        )));
    }
    let n = vertex_count.ok_or_else(|| RenderError::Ply("missing vertex element".into()))?;
    if n == 0 {
        return Err(RenderError::Ply("vertex count is zero".into()));
    }

    let mut payload = vec![0u8; n * 15]; // 3 * f32 + 3 * u8 per vertex
    r.read_exact(&mut payload).map_err(|_| {
        RenderError::Ply(format!("payload truncated: expected {} bytes", n * 15))
    })?;

    let mut positions = Vec::with_capacity(n);
    let mut colors = Vec::with_capacity(n);
    for i in 0..n {
        let b = &payload[i * 15..(i + 1) * 15];
        let f = |o: usize| f32::from_le_bytes([b[o], b[o + 1], b[o + 2], b[o + 3]]) as f64;
        positions.push(Vec3::new(f(0), f(4), f(8)));
        colors.push([
            b[12] as f32 / 255.0,
            b[13] as f32 / 255.0,
            b[14] as f32 / 255.0,
        ]);
    }
    PointCloud::new(positions, colors)
}
