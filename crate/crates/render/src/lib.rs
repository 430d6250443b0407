//! Point-cloud rasterization for the virtual camera rigs.
//!
//! The renderer projects colored world-space points through the shared
//! [`inhand_geometry::Projector`] and scatters them into per-view feature
//! images: RGB, normalized depth, and the winning point's world position.
//! Rendering is a pure function of the cloud and camera — no GPU, no
//! threading, depth ties broken deterministically — so identical inputs
//! produce bit-identical images everywhere.

mod cloud;
mod dump;
mod error;
mod ply;
mod raster;
mod unproject;
mod view;

pub use cloud::PointCloud;
pub use dump::{save_channels_raw, save_depth_png, save_rgb_png, save_rgb_ppm};
pub use error::RenderError;
pub use ply::{read_ply, write_ply};
pub use raster::{disc_offsets, render, render_stage, DEPTH_TIE_EPS};
pub use unproject::{unproject_rgbd, PinholeIntrinsics};
pub use view::{RenderedStage, RenderedView, VIEW_CHANNELS};
