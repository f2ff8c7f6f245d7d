//! Space-time fields produced by the contour, series and finite-difference
//! evaluators, and comparison between them.

use crate::Complex64 as C64;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Control,
    State,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Contour,
    Series,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Contour => "contour",
            Method::Series => "series",
            Method::Oracle => "oracle",
        }
    }
}

/// Values on an `x` by `t` grid, stored time-major: `values[it * nx + ix]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub quantity: Quantity,
    pub method: Method,
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub values: Vec<C64>,
    pub errors: Vec<f64>,
}

pub type ControlField = Field;
pub type StateField = Field;

impl Field {
    pub fn new(quantity: Quantity, method: Method, x: Vec<f64>, t: Vec<f64>) -> Self {
        let n = x.len() * t.len();
        Self {
            quantity,
            method,
            x,
            t,
            values: vec![C64::new(0.0, 0.0); n],
            errors: vec![0.0; n],
        }
    }

    pub fn index(&self, ix: usize, it: usize) -> usize {
        it * self.x.len() + ix
    }

    pub fn get(&self, ix: usize, it: usize) -> C64 {
        self.values[self.index(ix, it)]
    }

    pub fn row(&self, it: usize) -> &[C64] {
        let n = self.x.len();
        &self.values[it * n..(it + 1) * n]
    }

    /// Largest `|Im v| / (1 + |Re v|)` over the grid.
    pub fn imag_ratio(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs() / (1.0 + v.re.abs())).fold(0.0, f64::max)
    }

    pub fn max_error(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }

    /// Iterate `(x, t, value, err)` in time-major order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, C64, f64)> + '_ {
        self.t.iter().enumerate().flat_map(move |(it, &t)| {
            self.x
                .iter()
                .enumerate()
                .map(move |(ix, &x)| (x, t, self.get(ix, it), self.errors[self.index(ix, it)]))
        })
    }
}

/// Differences between two fields on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub max_abs: f64,
    pub rel_l2: f64,
    /// Max-abs difference per time slice.
    pub per_time: Vec<f64>,
}

pub fn compare_fields(a: &Field, b: &Field) -> Result<Comparison> {
    let same = |u: &[f64], v: &[f64]| u.len() == v.len() && u.iter().zip(v).all(|(p, q)| (p - q).abs() <= 1e-12 * (1.0 + p.abs()));
    if !same(&a.x, &b.x) || !same(&a.t, &b.t) {
        return Err(Error::GridMismatch(format!(
            "{}x{} grid vs {}x{} grid",
            a.x.len(),
            a.t.len(),
            b.x.len(),
            b.t.len()
        )));
    }
    let mut per_time = vec![0.0_f64; a.t.len()];
    let (mut num, mut den) = (0.0, 0.0);
    for it in 0..a.t.len() {
        for ix in 0..a.x.len() {
            let (p, q) = (a.get(ix, it), b.get(ix, it));
            let d = (p - q).norm();
            per_time[it] = per_time[it].max(d);
            num += d * d;
            den += q.norm_sqr();
        }
    }
    Ok(Comparison {
        max_abs: per_time.iter().copied().fold(0.0, f64::max),
        rel_l2: if den > 0.0 { (num / den).sqrt() } else { num.sqrt() },
        per_time,
    })
}
