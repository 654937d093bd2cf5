//! File formats: the HVS1 container, PGM/PNG images and annotation text.

pub mod annotations;
pub mod container;
pub mod image;

pub use annotations::{
    load_annotation_dirs, parse_classes, parse_detections, parse_ground_truth, read_classes, ClassNames,
};
pub use container::{read_container, write_container, CONTAINER_HEADER_LEN, CONTAINER_MAGIC};
pub use image::{decode_image, read_image, read_pgm, write_pgm, write_pgm_file};
