use alloc::vec;
use alloc::vec::Vec;

use super::QpModel;
use crate::numerics::Matrix;
use crate::simplex::StandardLp;

/// Column layout of the complementarity tableau
/// `[x; l; ep; en; s; yl | ye; yq; yn]`.
///
/// `yn` holds one extra artificial per inequality row with negative
/// right-hand side, where the slack `yl` cannot start basic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvoLayout {
    pub n: usize,
    pub ml: usize,
    pub me: usize,
    /// Inequality rows with `tl_k < 0`.
    pub negative_rows: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvoVar {
    X(usize),
    L(usize),
    Ep(usize),
    En(usize),
    S(usize),
    Yl(usize),
    Ye(usize),
    Yq(usize),
    Yn(usize),
}

impl EvoLayout {
    pub fn rows(&self) -> usize {
        self.ml + self.me + self.n
    }

    /// Columns that belong to the optimality system proper.
    pub fn core_cols(&self) -> usize {
        2 * self.n + 2 * self.ml + 2 * self.me
    }

    pub fn cols(&self) -> usize {
        3 * self.n + 2 * self.ml + 3 * self.me + self.negative_rows.len()
    }

    pub fn col(&self, v: EvoVar) -> usize {
        let (n, ml, me) = (self.n, self.ml, self.me);
        match v {
            EvoVar::X(i) => i,
            EvoVar::L(k) => n + k,
            EvoVar::Ep(j) => n + ml + j,
            EvoVar::En(j) => n + ml + me + j,
            EvoVar::S(i) => n + ml + 2 * me + i,
            EvoVar::Yl(k) => 2 * n + ml + 2 * me + k,
            EvoVar::Ye(j) => 2 * n + 2 * ml + 2 * me + j,
            EvoVar::Yq(i) => 2 * n + 2 * ml + 3 * me + i,
            EvoVar::Yn(r) => 3 * n + 2 * ml + 3 * me + r,
        }
    }

    pub fn var(&self, col: usize) -> EvoVar {
        let (n, ml, me) = (self.n, self.ml, self.me);
        let bounds = [
            (n, EvoVar::X as fn(usize) -> EvoVar),
            (ml, EvoVar::L),
            (me, EvoVar::Ep),
            (me, EvoVar::En),
            (n, EvoVar::S),
            (ml, EvoVar::Yl),
            (me, EvoVar::Ye),
            (n, EvoVar::Yq),
            (self.negative_rows.len(), EvoVar::Yn),
        ];
        let mut offset = 0;
        for (len, ctor) in bounds {
            if col < offset + len {
                return ctor(col - offset);
            }
            offset += len;
        }
        panic!("column {col} outside the tableau");
    }

    pub fn is_artificial(&self, col: usize) -> bool {
        col >= self.core_cols()
    }

    /// Free multiplier halves, excluded from sign checks during ranging.
    pub fn is_free(&self, col: usize) -> bool {
        matches!(self.var(col), EvoVar::Ep(_) | EvoVar::En(_))
    }

    /// Complementary partner under the tabu rule.
    pub fn complement(&self, col: usize) -> Option<usize> {
        match self.var(col) {
            EvoVar::X(i) => Some(self.col(EvoVar::S(i))),
            EvoVar::S(i) => Some(self.col(EvoVar::X(i))),
            EvoVar::L(k) => Some(self.col(EvoVar::Yl(k))),
            EvoVar::Yl(k) => Some(self.col(EvoVar::L(k))),
            _ => None,
        }
    }
}

/// The tableau at one value of `η`, together with its right-hand side split
/// as `t + η·dir`.
#[derive(Debug, Clone)]
pub struct EvoTableau {
    pub layout: EvoLayout,
    pub lp: StandardLp,
    pub t: Vec<f64>,
    pub dir: Vec<f64>,
    pub eta: f64,
    /// Initial basis: slacks, artificials for negative rows, `ye`, `yq`.
    pub start: Vec<usize>,
}

impl EvoTableau {
    pub fn tabu_pairs(&self) -> Vec<(usize, usize)> {
        let l = &self.layout;
        (0..l.n)
            .map(|i| (l.col(EvoVar::X(i)), l.col(EvoVar::S(i))))
            .chain((0..l.ml).map(|k| (l.col(EvoVar::Yl(k)), l.col(EvoVar::L(k)))))
            .collect()
    }
}

fn sign(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Builds the complementarity tableau for `m` at `eta`.
pub fn assemble_evo(m: &QpModel, eta: f64) -> EvoTableau {
    let (n, ml, me) = (m.n(), m.tl().rows(), m.te().rows());
    let negative_rows: Vec<usize> = (0..ml).filter(|&k| m.tl_rhs()[k] < 0.0).collect();
    let layout = EvoLayout { n, ml, me, negative_rows };
    let rows = layout.rows();
    let mut a = Matrix::zeros(rows, layout.cols());
    let (tl, te, q) = (m.tl(), m.te(), m.q());

    for k in 0..ml {
        for i in 0..n {
            a[(k, layout.col(EvoVar::X(i)))] = tl[(k, i)];
        }
        a[(k, layout.col(EvoVar::Yl(k)))] = 1.0;
    }
    for (r, &k) in layout.negative_rows.iter().enumerate() {
        a[(k, layout.col(EvoVar::Yn(r)))] = -1.0;
    }
    for j in 0..me {
        let row = ml + j;
        for i in 0..n {
            a[(row, layout.col(EvoVar::X(i)))] = te[(j, i)];
        }
        a[(row, layout.col(EvoVar::Ye(j)))] = sign(m.te_rhs()[j]);
    }
    for i in 0..n {
        let row = ml + me + i;
        for c in 0..n {
            a[(row, layout.col(EvoVar::X(c)))] = q[(i, c)];
        }
        for k in 0..ml {
            a[(row, layout.col(EvoVar::L(k)))] = tl[(k, i)];
        }
        for j in 0..me {
            a[(row, layout.col(EvoVar::Ep(j)))] = te[(j, i)];
            a[(row, layout.col(EvoVar::En(j)))] = -te[(j, i)];
        }
        a[(row, layout.col(EvoVar::S(i)))] = -1.0;
        a[(row, layout.col(EvoVar::Yq(i)))] = sign(eta * m.p()[i]);
    }

    let mut t = vec![0.0; rows];
    let mut dir = vec![0.0; rows];
    t[..ml].copy_from_slice(m.tl_rhs());
    t[ml..ml + me].copy_from_slice(m.te_rhs());
    dir[ml + me..].copy_from_slice(m.p());
    let d: Vec<f64> = t.iter().zip(&dir).map(|(a, b)| a + eta * b).collect();

    let mut start = Vec::with_capacity(rows);
    let mut neg = 0;
    for k in 0..ml {
        if m.tl_rhs()[k] < 0.0 {
            start.push(layout.col(EvoVar::Yn(neg)));
            neg += 1;
        } else {
            start.push(layout.col(EvoVar::Yl(k)));
        }
    }
    start.extend((0..me).map(|j| layout.col(EvoVar::Ye(j))));
    start.extend((0..n).map(|i| layout.col(EvoVar::Yq(i))));

    let c = vec![0.0; layout.cols()];
    let lp = StandardLp { a, d, c };
    EvoTableau { layout, lp, t, dir, eta, start }
}
