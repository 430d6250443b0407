use inhand_geometry::{CameraRig, VirtualCamera};

use crate::cloud::PointCloud;
use crate::view::{RenderedStage, RenderedView};

/// Depth ties closer than this resolve in favor of the earlier point index,
/// so that renders are reproducible across compilers and summation orders.
pub const DEPTH_TIE_EPS: f64 = 1e-9;

/// Rasterizes `cloud` into a single view.
///
/// Every point is projected through the camera's [`inhand_geometry::Projector`]
/// (the one shared projection routine, so tests can reproduce results
/// bit-exactly). A point participates only when its projected center lies
/// inside the image rectangle and its camera-space depth falls within
/// `[near, far]`; it then covers the disc of pixels whose integer offsets
/// `(di, dj)` from the center pixel satisfy `di^2 + dj^2 <= splat_radius^2`,
/// clipped to the image. Each pixel keeps the point with the smallest depth;
/// challengers must beat the incumbent by more than [`DEPTH_TIE_EPS`], which
/// makes near-ties deterministic (first point in index order wins).
pub fn render(cloud: &PointCloud, camera: &VirtualCamera, splat_radius: usize) -> RenderedView {
    let proj = camera.projector();
    let res = camera.resolution;
    let resf = res as f64;
    let n_px = res * res;

    let disc = disc_offsets(splat_radius);

    let mut best_depth = vec![f64::INFINITY; n_px];
    let mut winner = vec![u32::MAX; n_px];

    for (index, &p) in cloud.positions().iter().enumerate() {
        let (u, v, depth) = proj.project(p);
        if !proj.depth_in_range(depth) {
            continue;
        }
        if !(u >= 0.0 && u < resf && v >= 0.0 && v < resf) {
            continue;
        }
        let cu = u as isize; // u >= 0, so the cast floors
        let cv = v as isize;
        for &(di, dj) in &disc {
            let col = cu + di;
            let row = cv + dj;
            if col < 0 || row < 0 || col >= res as isize || row >= res as isize {
                continue;
            }
            let px = row as usize * res + col as usize;
            if depth < best_depth[px] - DEPTH_TIE_EPS {
                best_depth[px] = depth;
                winner[px] = index as u32;
            }
        }
    }

    // Second pass: turn the winner indices into feature channels.
    let anchor = camera.anchor;
    let depth_span = camera.far - camera.near;
    let mut rgb = vec![0.0f32; n_px * 3];
    let mut depth_norm = vec![1.0f32; n_px];
    let mut world_xyz = vec![0.0f32; n_px * 3];
    let mut depth_raw = vec![camera.far; n_px];
    let mut hit = vec![false; n_px];
    for px in 0..n_px {
        let w = winner[px];
        if w == u32::MAX {
            world_xyz[px * 3] = anchor.x as f32;
            world_xyz[px * 3 + 1] = anchor.y as f32;
            world_xyz[px * 3 + 2] = anchor.z as f32;
            continue;
        }
        let w = w as usize;
        let c = cloud.colors()[w];
        rgb[px * 3] = c[0];
        rgb[px * 3 + 1] = c[1];
        rgb[px * 3 + 2] = c[2];
        let d = best_depth[px];
        depth_raw[px] = d;
        depth_norm[px] = (((d - camera.near) / depth_span).clamp(0.0, 1.0)) as f32;
        let p = cloud.positions()[w];
        world_xyz[px * 3] = p.x as f32;
        world_xyz[px * 3 + 1] = p.y as f32;
        world_xyz[px * 3 + 2] = p.z as f32;
        hit[px] = true;
    }

    RenderedView {
        camera: camera.clone(),
        resolution: res,
        rgb,
        depth_norm,
        world_xyz,
        depth_raw,
        hit,
    }
}

/// Renders all five views of a rig, in rig order.
pub fn render_stage(cloud: &PointCloud, rig: &CameraRig, splat_radius: usize) -> RenderedStage {
    let views = rig
        .cameras
        .iter()
        .map(|cam| render(cloud, cam, splat_radius))
        .collect();
    RenderedStage {
        rig: rig.clone(),
        views,
    }
}

/// Integer offsets covering a filled disc of the given radius.
pub fn disc_offsets(radius: usize) -> Vec<(isize, isize)> {
    let r = radius as isize;
    let r2 = r * r;
    let mut out = Vec::new();
    for dj in -r..=r {
        for di in -r..=r {
            if di * di + dj * dj <= r2 {
                out.push((di, dj));
            }
        }
    }
    out
}
