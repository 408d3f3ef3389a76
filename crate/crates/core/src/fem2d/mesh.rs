//! Interface-fitted triangulations of the unit disk.
//!
//! A reference mesh is built once per target size on concentric rings: a
//! centre node, rings uniformly spaced on `(0, R]` and on `(R, 1]`, each ring
//! carrying a multiple of twelve equally spaced nodes. Consecutive rings are
//! stitched by merging their angular sequences with exact integer
//! comparisons, so the triangulation is invariant under rotation by `π/6`.
//!
//! Deformed meshes share the reference topology. Each node keeps its angle and
//! its radius is stretched piecewise linearly so that the interface ring lands
//! on `r(θ; t)` and the outer ring stays on the unit circle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::family::{InterfaceCurve, PerturbationFamily};
use crate::error::{Error, Result};

/// Rotational symmetry order of every ring.
pub const RING_SYMMETRY: usize = 12;

/// Smallest admissible triangle angle, in degrees.
pub const MIN_ANGLE_DEG: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    Inner,
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct RefNode {
    /// Reference radius in `[0, 1]`.
    rho: f64,
    theta: f64,
}

/// Topology plus reference polar coordinates.
#[derive(Debug, Clone)]
pub struct ReferenceMesh {
    radius: f64,
    h: f64,
    nodes: Vec<RefNode>,
    triangles: Vec<[usize; 3]>,
    regions: Vec<Region>,
    boundary: Vec<bool>,
    interface_nodes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub regions: Vec<Region>,
    /// Nodes on the unit circle.
    pub boundary: Vec<bool>,
    /// Interface nodes in increasing angle.
    pub interface_nodes: Vec<usize>,
    pub h: f64,
}

fn ring_count(rho: f64, step: f64) -> usize {
    let per_sector = (2.0 * PI * rho / (RING_SYMMETRY as f64 * step)).round() as usize;
    RING_SYMMETRY * per_sector.max(1)
}

impl ReferenceMesh {
    pub fn new(radius: f64, h: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::invalid(
                "radius",
                format!("must lie in (0, 1), got {radius}"),
            ));
        }
        if !(h > 0.0 && h < radius / 4.0) {
            return Err(Error::invalid(
                "h",
                format!(
                    "mesh size must lie in (0, R/4) = (0, {}), got {h}",
                    radius / 4.0
                ),
            ));
        }
        if !(h < (1.0 - radius) / 2.0) {
            return Err(Error::invalid(
                "h",
                format!(
                    "mesh size {h} cannot resolve the outer annulus of width {}",
                    1.0 - radius
                ),
            ));
        }
        let inner_rings = (radius / h).ceil() as usize;
        let outer_rings = ((1.0 - radius) / h).ceil() as usize;
        let inner_step = radius / inner_rings as f64;
        let outer_step = (1.0 - radius) / outer_rings as f64;

        // (reference radius, node count, radial step used for sizing)
        let mut rings = Vec::with_capacity(inner_rings + outer_rings);
        for i in 1..=inner_rings {
            let rho = if i == inner_rings {
                radius
            } else {
                radius * i as f64 / inner_rings as f64
            };
            rings.push((rho, ring_count(rho, inner_step)));
        }
        for i in 1..=outer_rings {
            let rho = if i == outer_rings {
                1.0
            } else {
                radius + (1.0 - radius) * i as f64 / outer_rings as f64
            };
            rings.push((rho, ring_count(rho, outer_step)));
        }

        let mut nodes = vec![RefNode {
            rho: 0.0,
            theta: 0.0,
        }];
        let mut offsets = vec![0usize];
        for &(rho, count) in &rings {
            offsets.push(nodes.len());
            nodes.extend((0..count).map(|j| RefNode {
                rho,
                theta: 2.0 * PI * j as f64 / count as f64,
            }));
        }
        let counts: Vec<usize> = std::iter::once(1)
            .chain(rings.iter().map(|r| r.1))
            .collect();

        let mut triangles = Vec::new();
        let mut regions = Vec::new();
        for layer in 0..rings.len() {
            let region = if layer < inner_rings {
                Region::Inner
            } else {
                Region::Outer
            };
            let before = triangles.len();
            stitch(
                offsets[layer],
                counts[layer],
                offsets[layer + 1],
                counts[layer + 1],
                &mut triangles,
            );
            regions.extend(std::iter::repeat_n(region, triangles.len() - before));
        }

        let boundary_start = *offsets.last().unwrap();
        let boundary = (0..nodes.len()).map(|i| i >= boundary_start).collect();
        let iface = offsets[inner_rings];
        let interface_nodes = (iface..iface + counts[inner_rings]).collect();

        let mesh = Self {
            radius,
            h,
            nodes,
            triangles,
            regions,
            boundary,
            interface_nodes,
        };
        Ok(mesh)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Places the nodes for the interface `curve`.
    pub fn deform(&self, curve: &InterfaceCurve) -> Result<Mesh> {
        let r0 = self.radius;
        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                let ri = curve.radius(n.theta);
                let r = if n.rho <= r0 {
                    if n.rho == r0 {
                        ri
                    } else {
                        n.rho / r0 * ri
                    }
                } else if n.rho == 1.0 {
                    1.0
                } else {
                    ri + (n.rho - r0) / (1.0 - r0) * (1.0 - ri)
                };
                let (s, c) = n.theta.sin_cos();
                [r * c, r * s]
            })
            .collect();
        let mesh = Mesh {
            nodes,
            triangles: self.triangles.clone(),
            regions: self.regions.clone(),
            boundary: self.boundary.clone(),
            interface_nodes: self.interface_nodes.clone(),
            h: self.h,
        };
        let worst = mesh.min_angle_deg();
        if !(worst >= MIN_ANGLE_DEG) || mesh.min_area() <= 0.0 {
            return Err(Error::Mesh(format!(
                "degenerate triangulation: minimum angle {worst:.2}°, minimum area {:e}",
                mesh.min_area()
            )));
        }
        Ok(mesh)
    }
}

/// Triangulates the strip between ring `a` (inner) and ring `b` (outer).
fn stitch(a0: usize, na: usize, b0: usize, nb: usize, out: &mut Vec<[usize; 3]>) {
    if na == 1 {
        for j in 0..nb {
            out.push([a0, b0 + j, b0 + (j + 1) % nb]);
        }
        return;
    }
    let (mut ia, mut ib) = (0usize, 0usize);
    while ia < na || ib < nb {
        // advance the ring whose next node comes first; ties advance the inner ring
        let inner_first = (ia + 1) * nb <= (ib + 1) * na;
        if inner_first && ia < na {
            out.push([a0 + ia, b0 + ib % nb, a0 + (ia + 1) % na]);
            ia += 1;
        } else {
            out.push([a0 + ia % na, b0 + ib, b0 + (ib + 1) % nb]);
            ib += 1;
        }
    }
}

impl Mesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Signed area (positive for counter-clockwise triangles).
    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|i| self.nodes[i]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    pub fn min_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_angle_deg(&self) -> f64 {
        self.triangles
            .iter()
            .map(|tri| {
                let p = tri.map(|i| self.nodes[i]);
                (0..3)
                    .map(|v| {
                        let o = p[v];
                        let a = p[(v + 1) % 3];
                        let b = p[(v + 2) % 3];
                        let u = [a[0] - o[0], a[1] - o[1]];
                        let w = [b[0] - o[0], b[1] - o[1]];
                        let cos = (u[0] * w[0] + u[1] * w[1])
                            / ((u[0] * u[0] + u[1] * u[1]).sqrt()
                                * (w[0] * w[0] + w[1] * w[1]).sqrt());
                        cos.clamp(-1.0, 1.0).acos().to_degrees()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Area of the inner region (the polygon bounded by the interface nodes).
    pub fn inner_area(&self) -> f64 {
        (0..self.triangles.len())
            .filter(|&t| self.regions[t] == Region::Inner)
            .map(|t| self.triangle_area(t))
            .sum()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }
}

/// Reference mesh of size `h` deformed to the family's interface at amplitude `t`.
pub fn build_mesh(family: &PerturbationFamily, t: f64, h: f64) -> Result<Mesh> {
    let reference = ReferenceMesh::new(family.geometry.radius(), h)?;
    reference.deform(&family.curve(t)?)
}
