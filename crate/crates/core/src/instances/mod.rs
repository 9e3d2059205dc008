//! Problem instances: generators, file readers and the exact oracle.

pub mod image;
pub mod oracle;
pub mod rudy;
pub mod sbm;
pub mod torus;

pub use image::{load_image, parse_image, ImageFeatures, ImageFormat};
pub use oracle::{best_random_guess, brute_force, BRUTE_FORCE_CAP};
pub use rudy::{parse_rudy, read_rudy, to_rudy, RudyOptions};
pub use sbm::{sbm_generate, SbmSpec};
pub use torus::{toroidal_grid_3d, TorusWeights};
