//! Random wavenumber fields `k(x, ξ) = k0(x) + Σ_ℓ ξ_ℓ k_ℓ(x)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::Grid;
use crate::error::{Error, Result};

/// Layer of the wedge model containing a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WedgeLayer {
    Bottom,
    Middle,
    Top,
}

impl WedgeLayer {
    pub fn index(self) -> usize {
        match self {
            WedgeLayer::Bottom => 0,
            WedgeLayer::Middle => 1,
            WedgeLayer::Top => 2,
        }
    }

    /// Layer of `(x, y)`: bottom for `y ≤ 0.2 + 0.1x`, top for
    /// `0.6 − 0.2x ≤ y`, middle otherwise.
    pub fn at(x: f64, y: f64) -> Self {
        if y <= 0.2 + 0.1 * x {
            WedgeLayer::Bottom
        } else if 0.6 - 0.2 * x <= y {
            WedgeLayer::Top
        } else {
            WedgeLayer::Middle
        }
    }

    /// Layer of the grid node `(i h, j h)` with `h = 1/cells`, decided in
    /// integer arithmetic so nodes on an interface land on the inclusive side.
    pub fn at_node(i: usize, j: usize, cells: usize) -> Self {
        let (i, j, c) = (i as u128, j as u128, cells as u128);
        // y ≤ 0.2 + 0.1 x  ⇔  10 j ≤ 2c + i
        if 10 * j <= 2 * c + i {
            WedgeLayer::Bottom
        } else if 6 * c <= 10 * j + 2 * i {
            WedgeLayer::Top
        } else {
            WedgeLayer::Middle
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    /// `k(ξ) = k0 + k1 ξ` on `(0, 1)`.
    Constant1d { k0: f64, k1: f64 },
    /// Three layers with wavenumber `(1 + θ ξ_ℓ) k_ℓ` in layer `ℓ`.
    Wedge2d { k: [f64; 3], theta: f64 },
}

/// Affine random wavenumber field on the unit interval or the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomField {
    shape: Shape,
}

impl RandomField {
    /// `k(ξ) = (1 + θξ) k̄`, requiring `k̄ > 0` and `0 < θ < 1`.
    pub fn constant_1d(kbar: f64, theta: f64) -> Result<Self> {
        if !(kbar > 0.0 && kbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("wavenumber must be positive, got {kbar}")));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidParameter(format!("theta must lie in (0, 1), got {theta}")));
        }
        Ok(Self {
            shape: Shape::Constant1d {
                k0: kbar,
                k1: theta * kbar,
            },
        })
    }

    /// Deterministic wavenumber `k̄` kept in a one-variable chaos space, the
    /// `θ = 0` member of the [`RandomField::constant_1d`] family.
    pub fn deterministic_1d(kbar: f64) -> Result<Self> {
        if !(kbar > 0.0 && kbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("wavenumber must be positive, got {kbar}")));
        }
        Ok(Self {
            shape: Shape::Constant1d { k0: kbar, k1: 0.0 },
        })
    }

    /// Wedge model with layer wavenumbers `k1, k2, k3` and relative spread `θ`.
    pub fn wedge_2d(k1: f64, k2: f64, k3: f64, theta: f64) -> Result<Self> {
        for k in [k1, k2, k3] {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::InvalidParameter(format!("wavenumber must be positive, got {k}")));
            }
        }
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::InvalidParameter(format!("theta must lie in [0, 1), got {theta}")));
        }
        Ok(Self {
            shape: Shape::Wedge2d { k: [k1, k2, k3], theta },
        })
    }

    /// Spatial dimension.
    pub fn dim(&self) -> usize {
        match self.shape {
            Shape::Constant1d { .. } => 1,
            Shape::Wedge2d { .. } => 2,
        }
    }

    /// Number of random variables `s`.
    pub fn num_vars(&self) -> usize {
        match self.shape {
            Shape::Constant1d { .. } => 1,
            Shape::Wedge2d { .. } => 3,
        }
    }

    /// `k0(x)` and `k_ℓ(x)` at a point (`x` has `dim()` coordinates).
    pub fn coefficients(&self, x: &[f64], kl: &mut [f64]) -> f64 {
        match self.shape {
            Shape::Constant1d { k0, k1 } => {
                kl[0] = k1;
                k0
            }
            Shape::Wedge2d { k, theta } => self.wedge_coefficients(WedgeLayer::at(x[0], x[1]), k, theta, kl),
        }
    }

    fn wedge_coefficients(&self, layer: WedgeLayer, k: [f64; 3], theta: f64, kl: &mut [f64]) -> f64 {
        kl[..3].fill(0.0);
        let l = layer.index();
        kl[l] = theta * k[l];
        k[l]
    }

    /// `k(x, ξ)`.
    pub fn eval(&self, x: &[f64], xi: &[f64]) -> f64 {
        let mut kl = vec![0.0; self.num_vars()];
        let k0 = self.coefficients(x, &mut kl);
        k0 + kl.iter().zip(xi).map(|(c, z)| c * z).sum::<f64>()
    }

    /// `max_x k0(x) + Σ_ℓ |k_ℓ(x)|` over the closed domain.
    pub fn max_wavenumber(&self) -> f64 {
        match self.shape {
            Shape::Constant1d { k0, k1 } => k0 + k1.abs(),
            Shape::Wedge2d { k, theta } => k.iter().map(|v| v * (1.0 + theta)).fold(0.0, f64::max),
        }
    }

    /// `min_x k0(x) − Σ_ℓ |k_ℓ(x)|`; positive fields have a positive margin.
    pub fn positivity_margin(&self) -> f64 {
        match self.shape {
            Shape::Constant1d { k0, k1 } => k0 - k1.abs(),
            Shape::Wedge2d { k, theta } => k.iter().map(|v| v * (1.0 - theta)).fold(f64::INFINITY, f64::min),
        }
    }

    /// Samples the coefficients at every node of `grid`, boundary included.
    pub fn sample(&self, grid: &Grid) -> Result<SampledField> {
        if grid.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: grid.dim(),
            });
        }
        let s = self.num_vars();
        let side = grid.q() + 2;
        let count = side.pow(grid.dim() as u32);
        let mut k0 = Vec::with_capacity(count);
        let mut kl = Vec::with_capacity(count * s);
        let mut buf = vec![0.0; s];
        for node in 0..count {
            let v = match self.shape {
                Shape::Constant1d { .. } => self.coefficients(&[grid.coord(node)], &mut buf),
                Shape::Wedge2d { k, theta } => {
                    let layer = WedgeLayer::at_node(node % side, node / side, side - 1);
                    self.wedge_coefficients(layer, k, theta, &mut buf)
                }
            };
            k0.push(v);
            kl.extend_from_slice(&buf);
        }
        Ok(SampledField { s, k0, kl })
    }
}

/// Field coefficients at the `(q+2)^d` nodes of a grid, `x` index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    s: usize,
    k0: Vec<f64>,
    kl: Vec<f64>,
}

impl SampledField {
    pub fn num_vars(&self) -> usize {
        self.s
    }

    pub fn len(&self) -> usize {
        self.k0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k0.is_empty()
    }

    pub fn mean(&self, node: usize) -> f64 {
        self.k0[node]
    }

    pub fn fluctuations(&self, node: usize) -> &[f64] {
        &self.kl[node * self.s..(node + 1) * self.s]
    }

    /// `k(x_node, ξ)`.
    pub fn eval(&self, node: usize, xi: &[f64]) -> f64 {
        let mut k = self.k0[node];
        for (c, z) in self.fluctuations(node).iter().zip(xi) {
            k += c * z;
        }
        k
    }

    /// Largest `k0 + Σ|k_ℓ|` over the sampled nodes.
    pub fn max_wavenumber(&self) -> f64 {
        (0..self.len())
            .map(|p| self.k0[p] + self.fluctuations(p).iter().map(|c| c.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Smallest `k0 − Σ|k_ℓ|` over the sampled nodes.
    pub fn positivity_margin(&self) -> f64 {
        (0..self.len())
            .map(|p| self.k0[p] - self.fluctuations(p).iter().map(|c| c.abs()).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }
}
