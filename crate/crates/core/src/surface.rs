//! Sampled semi-discrete surfaces together with their normals.

use crate::geom::{Ambient, Sheet, Vec4};
use crate::holo::GridSpec;

/// Sign constant of the flat (minimal/maximal) construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Epsilon {
    /// Minimal surfaces in R³.
    Plus,
    /// Maximal surfaces in R^{2,1}.
    Minus,
}

impl Epsilon {
    pub fn value(self) -> f64 {
        match self {
            Epsilon::Plus => 1.0,
            Epsilon::Minus => -1.0,
        }
    }

    pub fn from_sign(v: i32) -> Option<Self> {
        match v {
            1 => Some(Epsilon::Plus),
            -1 => Some(Epsilon::Minus),
            _ => None,
        }
    }

    pub fn ambient(self) -> Ambient {
        match self {
            Epsilon::Plus => Ambient::R3,
            Epsilon::Minus => Ambient::R21,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    MinMax { epsilon: Epsilon },
    /// Bryant-type surface in H³.
    BrLW { s: f64, lambda: f64 },
    /// Bianchi-type surface in S^{2,1}.
    BiLW { s: f64, lambda: f64 },
    ParallelOf { base: Box<Provenance>, theta: f64 },
}

impl Provenance {
    /// The provenance with all parallel shifts removed, and the total shift.
    pub fn root(&self) -> (&Provenance, f64) {
        match self {
            Provenance::ParallelOf { base, theta } => {
                let (r, t) = base.root();
                (r, t + theta)
            }
            p => (p, 0.0),
        }
    }
}

/// Where a strip crosses the locus on which the normal is undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub strip: usize,
    /// Crossing parameter, bracketed to 1e-10.
    pub t: f64,
    /// The crossing lies strictly between samples `sample` and `sample + 1`.
    pub sample: usize,
}

/// Positions, normals and their t-derivatives on a grid (row-major by strip).
#[derive(Debug, Clone, PartialEq)]
pub struct SemiDiscreteSurface {
    pub grid: GridSpec,
    pub ambient: Ambient,
    pub x: Vec<Vec4>,
    pub n: Vec<Vec4>,
    pub dx: Vec<Vec4>,
    pub dn: Vec<Vec4>,
    pub provenance: Provenance,
    /// Piece label per vertex; labels restart on each strip.
    pub piece: Vec<u32>,
    pub crossings: Vec<Crossing>,
}

/// Everything a curvature or singularity computation needs on one edge
/// `[x(k, t), x(k+1, t)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeData {
    pub dx: Vec4,
    pub dx1: Vec4,
    pub delta_x: Vec4,
    pub dn: Vec4,
    pub dn1: Vec4,
    pub delta_n: Vec4,
}

impl EdgeData {
    /// The same edge with the roles of position and normal exchanged.
    pub fn swapped(&self) -> EdgeData {
        EdgeData {
            dx: self.dn,
            dx1: self.dn1,
            delta_x: self.delta_n,
            dn: self.dx,
            dn1: self.dx1,
            delta_n: self.delta_x,
        }
    }
}

impl SemiDiscreteSurface {
    pub fn new_unpieced(
        grid: GridSpec,
        ambient: Ambient,
        x: Vec<Vec4>,
        n: Vec<Vec4>,
        dx: Vec<Vec4>,
        dn: Vec<Vec4>,
        provenance: Provenance,
    ) -> Self {
        let piece = vec![0; grid.len()];
        SemiDiscreteSurface { grid, ambient, x, n, dx, dn, provenance, piece, crossings: Vec::new() }
    }

    pub fn strips(&self) -> usize {
        self.grid.strips()
    }

    pub fn samples(&self) -> usize {
        self.grid.samples()
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        self.grid.index(i, j)
    }

    pub fn x(&self, i: usize, j: usize) -> Vec4 {
        self.x[self.idx(i, j)]
    }

    pub fn n(&self, i: usize, j: usize) -> Vec4 {
        self.n[self.idx(i, j)]
    }

    pub fn dx(&self, i: usize, j: usize) -> Vec4 {
        self.dx[self.idx(i, j)]
    }

    pub fn dn(&self, i: usize, j: usize) -> Vec4 {
        self.dn[self.idx(i, j)]
    }

    /// Data on the edge from strip `i` to strip `i + 1` at sample `j`.
    pub fn edge(&self, i: usize, j: usize) -> EdgeData {
        EdgeData {
            dx: self.dx(i, j),
            dx1: self.dx(i + 1, j),
            delta_x: self.x(i + 1, j) - self.x(i, j),
            dn: self.dn(i, j),
            dn1: self.dn(i + 1, j),
            delta_n: self.n(i + 1, j) - self.n(i, j),
        }
    }

    /// Whether the grid cell with lower corner `(i, j)` contains no crossing.
    pub fn cell_is_regular(&self, i: usize, j: usize) -> bool {
        let same = |s: usize| self.piece[self.idx(s, j)] == self.piece[self.idx(s, j + 1)];
        same(i) && same(i + 1)
    }

    pub fn sheet(&self, i: usize, j: usize) -> Option<Sheet> {
        self.ambient.sheet(&self.x(i, j))
    }

    /// The surface traced by the normal, with the original positions as its
    /// normal field.
    pub fn dual(&self, ambient: Ambient, provenance: Provenance) -> SemiDiscreteSurface {
        SemiDiscreteSurface {
            grid: self.grid,
            ambient,
            x: self.n.clone(),
            n: self.x.clone(),
            dx: self.dn.clone(),
            dn: self.dx.clone(),
            provenance,
            piece: self.piece.clone(),
            crossings: self.crossings.clone(),
        }
    }

    /// Largest `|n ∘ ∂x|/(‖n‖‖∂x‖)` over the grid (coordinate norms).
    pub fn legendre_residual(&self) -> f64 {
        self.n
            .iter()
            .zip(&self.dx)
            .map(|(n, d)| {
                let scale = n.norm() * d.norm();
                if scale == 0.0 {
                    0.0
                } else {
                    self.ambient.inner(n, d).abs() / scale
                }
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|v∘v − target|` over the listed vectors.
    pub fn norm_residual(&self, which: &[Vec4], target: f64) -> f64 {
        which
            .iter()
            .map(|v| (self.ambient.inner(v, v) - target).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|x ∘ n|` over the grid.
    pub fn orthogonality_residual(&self) -> f64 {
        self.x
            .iter()
            .zip(&self.n)
            .map(|(x, n)| self.ambient.inner(x, n).abs())
            .fold(0.0, f64::max)
    }

    /// Finite-difference check of `∂(Δx) = Δ(∂x)`: five-point derivative of
    /// `x₁ − x` against `∂x₁ − ∂x`, on samples at least two steps from the ends.
    pub fn compatibility_residual_fd(&self) -> f64 {
        let (ns, nt) = (self.strips(), self.samples());
        let h = self.grid.h;
        let mut worst = 0.0_f64;
        for i in 0..ns - 1 {
            let delta = |j: usize| self.x(i + 1, j) - self.x(i, j);
            for j in 2..nt.saturating_sub(2) {
                if (j - 2..j + 2).any(|c| !self.cell_is_regular(i, c)) {
                    continue;
                }
                let fd = (delta(j - 2) - delta(j - 1) * 8.0 + delta(j + 1) * 8.0 - delta(j + 2)) * (1.0 / (12.0 * h));
                let exact = self.dx(i + 1, j) - self.dx(i, j);
                worst = worst.max((fd - exact).norm());
            }
        }
        worst
    }

    /// Copy translated by `p` (positions only).
    pub fn translated(&self, p: Vec4) -> SemiDiscreteSurface {
        let mut s = self.clone();
        for v in s.x.iter_mut() {
            *v += p;
        }
        s
    }
}
