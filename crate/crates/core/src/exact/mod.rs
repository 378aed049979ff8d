//! Exact rational and integer linear algebra. Nothing in this crate uses
//! floating point.

mod linsys;
mod matrix;
mod rat;
mod smith;

pub use linsys::{LinearSystem, SpanTracker, SparseRow};
pub use matrix::{MatQ, MatZ, Rref};
pub use rat::{rat, ratio, ParseRatError, Rat};
pub use smith::{smith_normal_form, SmithForm};

/// `Σ a_i b_i`
pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(Rat::is_zero)
}

pub fn zero_vec(n: usize) -> Vec<Rat> {
    vec![Rat::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vec<Rat> {
    let mut v = zero_vec(n);
    v[i] = Rat::one();
    v
}

/// `y += c * x`
pub fn axpy(y: &mut [Rat], c: &Rat, x: &[Rat]) {
    debug_assert_eq!(x.len(), y.len());
    if c.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += c * xi;
        }
    }
}

pub fn scale_vec(c: &Rat, x: &[Rat]) -> Vec<Rat> {
    x.iter().map(|xi| c * xi).collect()
}

pub fn add_vec(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn int_vec(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| rat(x)).collect()
}
