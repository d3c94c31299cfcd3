//! Cycle integrals C_k(h,Q) = D^{1/2−k/4} ∫_{Γ_Q\S_Q} h(z) Q(z,1)^{k/2−1} dz.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qforms::{reduce_point, GeodesicArc, QForm};

pub const DEFAULT_NODES: usize = 64;
pub const MAX_NODES: usize = 1024;
pub const CYCLE_TOL: f64 = 1e-9;

/// Gauss–Legendre nodes and weights on [−1, 1], cached by degree.
fn legendre(n: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().expect("node cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("at least one node"));
            Arc::new(rule.as_node_weight_pairs().to_vec())
        })
        .clone()
}

/// A quadrature discretisation of one period of S_Q, in hyperbolic arclength.
#[derive(Clone, Debug)]
pub struct CyclePath {
    pub form: QForm,
    pub arc: GeodesicArc,
    /// (z, weight·dz/dt) per node.
    pub nodes: Vec<(Complex64, Complex64)>,
}

impl CyclePath {
    pub fn new(form: QForm, n: usize) -> Result<Self> {
        Self::with_offset(form, n, 0.0)
    }

    /// Period starting at arclength `t0` from the apex instead of at the apex.
    pub fn with_offset(form: QForm, n: usize, t0: f64) -> Result<Self> {
        let arc = form.geodesic_arc()?;
        let half = arc.period / 2.0;
        let nodes = legendre(n)
            .iter()
            .map(|&(x, w)| {
                let (z, dz) = arc.point(t0 + half * (x + 1.0));
                (z, dz * (w * half))
            })
            .collect();
        Ok(CyclePath { form, arc, nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// z(0) and z(period), the endpoints of the fundamental arc.
    pub fn endpoints(&self) -> (Complex64, Complex64) {
        (self.arc.point(0.0).0, self.arc.point(self.arc.period).0)
    }

    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, h: F, k: i32) -> Complex64 {
        let q = self.form;
        let disc = q.disc() as f64;
        let e = k / 2 - 1;
        let total: Complex64 = self.nodes.iter().map(|&(z, wdz)| h(z) * q.value(z).powi(e) * wdz).sum();
        total * disc.powf(0.5 - k as f64 / 4.0)
    }
}

/// Cycle integral with a fixed node count.
pub fn cycle_integral<F: Fn(Complex64) -> Complex64>(h: F, k: i32, q: &QForm, n: usize) -> Result<Complex64> {
    Ok(CyclePath::new(*q, n)?.integrate(h, k))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CycleResult {
    pub value: Complex64,
    pub err_estimate: f64,
    pub nodes: usize,
    pub converged: bool,
}

/// Doubles the node count from `n0` until the relative change is below `tol` or `MAX_NODES` is reached.
pub fn cycle_integral_adaptive<F: Fn(Complex64) -> Complex64>(
    h: F,
    k: i32,
    q: &QForm,
    n0: usize,
    tol: f64,
) -> Result<CycleResult> {
    if k % 2 != 0 {
        return Err(Error::Domain(format!("cycle integrals need even weight, got {k}")));
    }
    let mut n = n0.max(2);
    let mut prev = cycle_integral(&h, k, q, n)?;
    loop {
        let next_n = 2 * n;
        let cur = cycle_integral(&h, k, q, next_n)?;
        let change = (cur - prev).norm();
        let converged = change <= tol * cur.norm().max(f64::MIN_POSITIVE) || change == 0.0;
        if converged || next_n >= MAX_NODES {
            return Ok(CycleResult { value: cur, err_estimate: change, nodes: next_n, converged });
        }
        prev = cur;
        n = next_n;
    }
}

/// Wraps a weight-`k` modular function so it is evaluated at the reduced image of its argument.
pub fn via_fundamental_domain<F: Fn(Complex64) -> Complex64>(f: F, k: i32) -> impl Fn(Complex64) -> Complex64 {
    move |z| {
        let (w, g) = reduce_point(z);
        f(w) * g.j(z).powi(-k)
    }
}
