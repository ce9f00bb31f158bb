use serde::{Deserialize, Serialize};

use crate::error::{Result, VeinError};
use crate::geom::{dot, scaled, Point};

use super::hull::{convex_hull, Facet, HULL_TOL};

/// A polytope given by its vertices, optionally with its facet description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    pub vertices: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<Facet>>,
}

impl Polytope {
    pub fn new(vertices: Vec<Point>) -> Self {
        Polytope {
            vertices,
            facets: None,
        }
    }

    /// Builds the polytope and attaches its facets (d ≤ 3).
    pub fn with_facets(vertices: Vec<Point>) -> Result<Self> {
        let facets = convex_hull(&vertices)?.facets;
        Ok(Polytope {
            vertices,
            facets: Some(facets),
        })
    }

    pub fn dim(&self) -> usize {
        self.vertices.first().map_or(0, |v| v.len())
    }

    /// Facets, computing them when absent.
    pub fn facets(&self) -> Result<Vec<Facet>> {
        match &self.facets {
            Some(f) => Ok(f.clone()),
            None => Ok(convex_hull(&self.vertices)?.facets),
        }
    }

    pub fn scaled(&self, t: f64) -> Polytope {
        Polytope {
            vertices: self.vertices.iter().map(|v| scaled(v, t)).collect(),
            facets: self.facets.as_ref().map(|fs| {
                fs.iter()
                    .map(|f| Facet {
                        normal: f.normal.clone(),
                        offset: f.offset * t,
                    })
                    .collect()
            }),
        }
    }

    /// Support function `max_v ⟨u, v⟩` over the vertices.
    pub fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(u, v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Checks that every vertex satisfies every facet inequality and that
    /// every facet is attained by at least `d` vertices.
    pub fn check_facets(&self) -> bool {
        let Some(facets) = &self.facets else {
            return true;
        };
        let d = self.dim();
        facets.iter().all(|f| {
            let mut attained = 0;
            for v in &self.vertices {
                let slack = f.offset - dot(&f.normal, v);
                if slack < -HULL_TOL {
                    return false;
                }
                if slack <= HULL_TOL {
                    attained += 1;
                }
            }
            attained >= d
        })
    }

    /// Extreme points of the hull (d ≤ 3).
    pub fn extreme_vertices(&self) -> Result<Vec<Point>> {
        Ok(convex_hull(&self.vertices)?.extreme_points())
    }

    /// Exact volume (d ≤ 3).
    pub fn volume(&self) -> Result<f64> {
        Ok(convex_hull(&self.vertices)?.volume())
    }
}

/// Polar of a polytope containing the origin in its interior (d ≤ 3).
///
/// Each facet `⟨ν, x⟩ ≤ β` becomes the vertex `ν/β`; the facets of the polar
/// are `{x : ⟨v, x⟩ ≤ 1}` for the vertices `v` of the input.
pub fn polar_polytope(poly: &Polytope) -> Result<Polytope> {
    let facets = poly.facets()?;
    if let Some(f) = facets.iter().find(|f| f.offset <= HULL_TOL) {
        return Err(VeinError::OriginNotInterior { offset: f.offset });
    }
    let vertices: Vec<Point> = facets.iter().map(|f| scaled(&f.normal, 1.0 / f.offset)).collect();
    Polytope::with_facets(vertices)
}

/// Volume of `conv(points)` in d ≤ 3.
pub fn polytope_volume(points: &[Point]) -> Result<f64> {
    Ok(convex_hull(points)?.volume())
}
