//! Domains, node clouds, local subdomains and neighbor search.
//!
//! Points are stored as `[f64; 3]` in both 2D and 3D; in 2D the third
//! coordinate is always zero.

mod domain;
mod neighbors;
mod nodes;
mod subdomain;

pub use domain::{DomainGeometry, DomainKind, Face, FaceShape};
pub use neighbors::{neighbors_brute_force, NeighborGrid};
pub use nodes::{
    generate_beam_nodes, generate_boussinesq_nodes, generate_box_nodes, generate_plate_nodes, BoundaryTag,
    BoussinesqLayout, NodeSet, PlateLayout,
};
pub use subdomain::{
    build_subdomain, BallRegion, BoundaryPiece, DiskRegion, HoleCut, PieceLocation, PieceShape, Region, ShapeKind,
    Subdomain,
};

pub type Point = [f64; 3];

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: &Point, b: &Point) -> f64 {
    norm(&sub(a, b))
}

#[inline]
pub fn scale(a: &Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}
