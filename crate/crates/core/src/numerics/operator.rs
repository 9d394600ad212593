use nalgebra::DMatrix;

/// A symmetric linear operator on `R^dim`.
pub trait SymOperator {
    fn dim(&self) -> usize;

    /// `y = A x`. Implementations sum in a fixed order.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    fn diagonal(&self) -> Vec<f64>;

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply(x, &mut y);
        y
    }

    /// `⟨x, A y⟩`.
    fn form(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.apply_vec(y))
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Symmetric sparse matrix in CSR form with both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrSym {
    dim: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrSym {
    /// Builds from per-row `(column, value)` lists. Rows are sorted; the
    /// caller is responsible for symmetry.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let dim = rows.len();
        let mut offsets = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        offsets.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            for (c, v) in row {
                debug_assert!(c < dim);
                cols.push(c);
                vals.push(v);
            }
            offsets.push(cols.len());
        }
        CsrSym {
            dim,
            offsets,
            cols,
            vals,
        }
    }

    pub fn from_dense(a: &DMatrix<f64>) -> Self {
        let rows = (0..a.nrows())
            .map(|i| {
                (0..a.ncols())
                    .filter(|&j| a[(i, j)] != 0.0)
                    .map(|j| (j, a[(i, j)]))
                    .collect()
            })
            .collect();
        Self::from_rows(rows)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_rows((0..dim).map(|i| vec![(i, 1.0)]).collect())
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                a[(i, j)] += v;
            }
        }
        a
    }

    /// Largest absolute row sum, an upper bound on the spectral norm.
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl SymOperator for CsrSym {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let r = self.offsets[i]..self.offsets[i + 1];
            let mut acc = 0.0;
            for (c, v) in self.cols[r.clone()].iter().zip(&self.vals[r]) {
                acc += v * x[*c];
            }
            *yi = acc;
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }
}

/// `A + e_o e_oᵀ`.
#[derive(Debug, Clone, Copy)]
pub struct RankOneShift<'a, A: SymOperator + ?Sized> {
    pub inner: &'a A,
    pub vertex: usize,
}

impl<A: SymOperator + ?Sized> SymOperator for RankOneShift<'_, A> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.inner.apply(x, y);
        y[self.vertex] += x[self.vertex];
    }

    fn diagonal(&self) -> Vec<f64> {
        let mut d = self.inner.diagonal();
        d[self.vertex] += 1.0;
        d
    }
}

/// Largest relative asymmetry `|⟨Ax,y⟩ − ⟨x,Ay⟩| / (‖A‖‖x‖‖y‖)` over the
/// given probe pairs.
pub fn symmetry_defect<A: SymOperator + ?Sized>(a: &A, probes: &[(Vec<f64>, Vec<f64>)]) -> f64 {
    let diag_scale = a.diagonal().iter().fold(1e-300f64, |m, d| m.max(d.abs()));
    probes
        .iter()
        .map(|(x, y)| {
            let lhs = dot(&a.apply_vec(x), y);
            let rhs = dot(x, &a.apply_vec(y));
            (lhs - rhs).abs() / (diag_scale * norm(x) * norm(y)).max(1e-300)
        })
        .fold(0.0, f64::max)
}
