//! Independent oracles shared by the integration tests: dense Gaussian
//! elimination on explicitly assembled matrices and seeded random sections.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use royden::{RawGraph, Section, VertexFn};

pub type Dense = Vec<Vec<f64>>;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Dense, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        assert!(p.abs() > 1e-300, "singular system");
        for row in col + 1..n {
            let factor = a[row][col] / p;
            if factor != 0.0 {
                let (upper, lower) = a.split_at_mut(row);
                for (x, y) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *x -= factor * y;
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Energy matrix on the vertex list `keep`, built entry by entry from the
/// definition of the form (the full weighted degree plus `c` on the diagonal).
pub fn form_matrix(s: &Section, keep: &[usize], with_killing: bool) -> Dense {
    let n = keep.len();
    let mut a = vec![vec![0.0; n]; n];
    for (i, &u) in keep.iter().enumerate() {
        a[i][i] = if with_killing { s.killing(u) } else { 0.0 };
        for w in 0..s.len() {
            let b = s.weight(u, w);
            a[i][i] += b;
            if let Some(j) = keep.iter().position(|&k| k == w) {
                a[i][j] -= b;
            }
        }
    }
    a
}

/// Energy by the double sum `½ Σ_{x,y} b (f(x) − f(y))² + Σ c f²`.
pub fn energy_oracle(s: &Section, f: &VertexFn) -> f64 {
    let mut total = 0.0;
    for x in 0..s.len() {
        for y in 0..s.len() {
            let d = f[x] - f[y];
            total += 0.5 * s.weight(x, y) * d * d;
        }
        total += s.killing(x) * f[x] * f[x];
    }
    total
}

/// Capacity of an interior vertex of a grounded component.
pub fn cap_oracle(s: &Section, x: usize) -> f64 {
    let comps = s.interior_components();
    let id = comps.component_of[x].unwrap();
    let keep: Vec<usize> = comps.members[id]
        .iter()
        .copied()
        .filter(|&v| v != x)
        .collect();
    if keep.is_empty() {
        return s.degree(x) + s.killing(x);
    }
    let a = form_matrix(s, &keep, true);
    let rhs: Vec<f64> = keep.iter().map(|&v| s.weight(v, x)).collect();
    let u = gauss_solve(a, rhs);
    let mut f = VertexFn::zeros(s.len());
    f[x] = 1.0;
    for (&v, val) in keep.iter().zip(u) {
        f[v] = val;
    }
    energy_oracle(s, &f)
}

/// `γ²` when every interior component is grounded.
pub fn gamma_sq_oracle(s: &Section, x: usize, y: usize) -> f64 {
    let keep = s.interior();
    let a = form_matrix(s, &keep, true);
    let mut d = vec![0.0; keep.len()];
    if let Some(i) = keep.iter().position(|&v| v == x) {
        d[i] += 1.0;
    }
    if let Some(j) = keep.iter().position(|&v| v == y) {
        d[j] -= 1.0;
    }
    let u = gauss_solve(a, d.clone());
    d.iter().zip(&u).map(|(p, q)| p * q).sum()
}

/// Free effective resistance on a connected section.
pub fn resistance_oracle(s: &Section, x: usize, y: usize) -> f64 {
    let keep: Vec<usize> = (0..s.len()).filter(|&v| v != y).collect();
    let a = form_matrix(s, &keep, false);
    let mut rhs = vec![0.0; keep.len()];
    let i = keep.iter().position(|&v| v == x).unwrap();
    rhs[i] = 1.0;
    gauss_solve(a, rhs)[i]
}

#[derive(Debug, Clone, Copy)]
pub struct RandomSpec {
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub mask_probability: f64,
    pub killing_probability: f64,
    pub random_measure: bool,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            min_vertices: 3,
            max_vertices: 50,
            mask_probability: 0.25,
            killing_probability: 0.0,
            random_measure: false,
        }
    }
}

/// Connected random section (random spanning tree plus extra edges) with a
/// nonempty mask and a nonempty interior.
pub fn random_section(seed: u64, spec: RandomSpec) -> Section {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(spec.min_vertices..=spec.max_vertices);
    let mut raw = RawGraph::new(n);
    let mut present = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        present.insert((u, v));
        raw = raw.edge(u, v, rng.random_range(0.1..3.0));
    }
    let extra = rng.random_range(0..=n);
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        let key = (u.min(v), u.max(v));
        if u != v && present.insert(key) {
            raw = raw.edge(key.0, key.1, rng.random_range(0.1..3.0));
        }
    }
    let mut masked: Vec<usize> = (0..n)
        .filter(|_| rng.random_bool(spec.mask_probability))
        .collect();
    if masked.is_empty() {
        masked.push(rng.random_range(0..n));
    }
    if masked.len() == n {
        masked.remove(rng.random_range(0..n));
    }
    for v in masked {
        raw = raw.dirichlet(v);
    }
    for v in 0..n {
        if rng.random_bool(spec.killing_probability) {
            raw = raw.killing(v, rng.random_range(0.05..1.0));
        }
        if spec.random_measure {
            raw = raw.measure(v, rng.random_range(0.2..5.0));
        }
    }
    Section::build(&raw).unwrap()
}

/// Random function with standard-ish normal values on `support`.
pub fn random_fn(rng: &mut impl Rng, n: usize, support: &[usize]) -> VertexFn {
    let mut f = VertexFn::zeros(n);
    for &v in support {
        f[v] = rng.random_range(-2.0..2.0);
    }
    f
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn mat_mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik != 0.0 {
                for j in 0..n {
                    c[i][j] += aik * b[k][j];
                }
            }
        }
    }
    c
}

/// `e^{−t M⁻¹A} f` on the interior by Taylor series with scaling and squaring.
pub fn heat_oracle(s: &Section, t: f64, f: &VertexFn) -> VertexFn {
    let keep = s.interior();
    let n = keep.len();
    let a = form_matrix(s, &keep, true);
    let mut b: Dense = (0..n)
        .map(|i| (0..n).map(|j| -t * a[i][j] / s.measure(keep[i])).collect())
        .collect();
    let norm = b
        .iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    for row in &mut b {
        for x in row.iter_mut() {
            *x *= scale;
        }
    }
    let mut exp: Dense = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut term = exp.clone();
    for k in 1..=24 {
        term = mat_mul(&term, &b);
        for row in &mut term {
            for x in row.iter_mut() {
                *x /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                exp[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        exp = mat_mul(&exp, &exp);
    }
    let mut out = VertexFn::zeros(s.len());
    for i in 0..n {
        out[keep[i]] = (0..n).map(|j| exp[i][j] * f[keep[j]]).sum();
    }
    out
}

/// Residual `max_i |(A v − λ M v)_i|` of an eigenpair against the oracle matrix.
pub fn eigen_residual(s: &Section, lambda: f64, v: &VertexFn) -> f64 {
    let keep = s.interior();
    let a = form_matrix(s, &keep, true);
    (0..keep.len())
        .map(|i| {
            let av: f64 = (0..keep.len()).map(|j| a[i][j] * v[keep[j]]).sum();
            (av - lambda * s.measure(keep[i]) * v[keep[i]]).abs()
        })
        .fold(0.0, f64::max)
}
