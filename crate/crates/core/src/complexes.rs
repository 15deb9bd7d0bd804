//! Bounded cochain complexes of finite-dimensional spaces.
//!
//! A [`Complex`] lives on a degree window and is zero outside it, so tensor
//! products and Hom-complexes of bounded complexes are honest complexes with
//! `d∘d = 0` everywhere. Cohomology is only reported at interior degrees,
//! where it does not depend on what the window cut away.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ComplexError;
use crate::field::Field;
use crate::linalg::{ColumnBasis, Matrix};

pub const DEFAULT_DIM_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self, ComplexError> {
        if lo > hi {
            return Err(ComplexError::BadWindow { lo, hi });
        }
        Ok(Window { lo, hi })
    }

    pub fn symmetric(r: i64) -> Self {
        Window { lo: -r, hi: r }
    }

    pub fn contains(&self, i: i64) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn is_interior(&self, i: i64) -> bool {
        self.lo < i && i < self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn intersect(&self, other: &Window) -> Option<Window> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Window { lo, hi })
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Complex<F: Field> {
    ctx: F::Ctx,
    window: Window,
    dims: Vec<usize>,
    // diffs[k] is d^{lo+k}: C^{lo+k} -> C^{lo+k+1}
    diffs: Vec<Matrix<F>>,
}

impl<F: Field> Complex<F> {
    pub fn ctx(&self) -> F::Ctx {
        self.ctx
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn dim(&self, i: i64) -> usize {
        if self.window.contains(i) {
            self.dims[(i - self.window.lo) as usize]
        } else {
            0
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// `d^i: C^i -> C^{i+1}`, the zero map when either side is outside the window.
    pub fn d(&self, i: i64) -> Matrix<F> {
        if self.window.contains(i) && self.window.contains(i + 1) {
            self.diffs[(i - self.window.lo) as usize].clone()
        } else {
            Matrix::zeros(self.ctx, self.dim(i + 1), self.dim(i))
        }
    }

    pub fn d_ref(&self, i: i64) -> Option<&Matrix<F>> {
        if self.window.contains(i) && self.window.contains(i + 1) {
            Some(&self.diffs[(i - self.window.lo) as usize])
        } else {
            None
        }
    }

    /// A single space of dimension `dim` placed in `degree`.
    pub fn concentrated(ctx: F::Ctx, degree: i64, dim: usize) -> Self {
        Complex {
            ctx,
            window: Window { lo: degree, hi: degree },
            dims: vec![dim],
            diffs: Vec::new(),
        }
    }

    /// The same data viewed on a larger window, padded with zeros.
    pub fn widen(&self, window: Window) -> Self {
        assert!(window.contains_window(&self.window));
        let dims: Vec<usize> = window.degrees().map(|i| self.dim(i)).collect();
        let diffs = (window.lo..window.hi).map(|i| self.d(i)).collect();
        Complex {
            ctx: self.ctx,
            window,
            dims,
            diffs,
        }
    }
}

pub fn make_complex<F: Field>(
    ctx: F::Ctx,
    window: Window,
    dims: Vec<usize>,
    diffs: Vec<Matrix<F>>,
) -> Result<Complex<F>, ComplexError> {
    make_complex_capped(ctx, window, dims, diffs, DEFAULT_DIM_CAP)
}

pub fn make_complex_capped<F: Field>(
    ctx: F::Ctx,
    window: Window,
    dims: Vec<usize>,
    diffs: Vec<Matrix<F>>,
    cap: usize,
) -> Result<Complex<F>, ComplexError> {
    let window = Window::new(window.lo, window.hi)?;
    if dims.len() != window.len() {
        return Err(ComplexError::ShapeMismatch {
            degree: window.lo,
            detail: format!("{} dimensions for a window of length {}", dims.len(), window.len()),
        });
    }
    if diffs.len() != window.len() - 1 {
        return Err(ComplexError::ShapeMismatch {
            degree: window.lo,
            detail: format!("{} differentials for a window of length {}", diffs.len(), window.len()),
        });
    }
    let total: usize = dims.iter().sum();
    if total > cap {
        return Err(ComplexError::TooLarge { total, cap });
    }
    for (k, d) in diffs.iter().enumerate() {
        if d.shape() != (dims[k + 1], dims[k]) {
            return Err(ComplexError::ShapeMismatch {
                degree: window.lo + k as i64,
                detail: format!("expected {}x{}, found {}x{}", dims[k + 1], dims[k], d.rows(), d.cols()),
            });
        }
    }
    for k in 0..diffs.len().saturating_sub(1) {
        if !diffs[k + 1].mul(&diffs[k]).is_zero() {
            return Err(ComplexError::SquareNonZero {
                degree: window.lo + k as i64,
            });
        }
    }
    Ok(Complex {
        ctx,
        window,
        dims,
        diffs,
    })
}

/// `C[n]^i = C^{n+i}` with differential `(-1)^n d_C`.
pub fn shift<F: Field>(c: &Complex<F>, n: i64) -> Complex<F> {
    let s = F::sign(c.ctx, n);
    Complex {
        ctx: c.ctx,
        window: Window {
            lo: c.window.lo - n,
            hi: c.window.hi - n,
        },
        dims: c.dims.clone(),
        diffs: c.diffs.iter().map(|d| d.scale(&s)).collect(),
    }
}

/// Cohomology at one degree with explicit representatives.
#[derive(Clone, Debug)]
pub struct Cohomology<F: Field> {
    pub degree: i64,
    pub dim: usize,
    /// Columns are cocycles whose classes form a basis.
    pub representatives: Matrix<F>,
    differential: Matrix<F>,
    boundary_dim: usize,
    classifier: ColumnBasis<F>,
}

impl<F: Field> Cohomology<F> {
    /// Class coordinates of `v`, or `None` if `v` is not a cocycle.
    pub fn class_of(&self, v: &[F]) -> Option<Vec<F>> {
        if self.differential.mul_vec(v).iter().any(|x| !x.is_zero()) {
            return None;
        }
        let c = self.classifier.coords(v)?;
        Some(c[self.boundary_dim..].to_vec())
    }

    pub fn is_coboundary(&self, v: &[F]) -> bool {
        self.class_of(v).is_some_and(|c| c.iter().all(|x| x.is_zero()))
    }

    pub fn representative(&self, k: usize) -> Vec<F> {
        self.representatives.column(k)
    }
}

pub fn cohomology<F: Field>(c: &Complex<F>, i: i64) -> Result<Cohomology<F>, ComplexError> {
    let w = c.window;
    if !w.is_interior(i) {
        return Err(ComplexError::EdgeDegree {
            degree: i,
            lo: w.lo,
            hi: w.hi,
        });
    }
    Ok(cohomology_unchecked(c, i))
}

/// Cohomology treating the complex as zero outside its window.
pub fn cohomology_unchecked<F: Field>(c: &Complex<F>, i: i64) -> Cohomology<F> {
    let n = c.dim(i);
    let d_out = c.d(i);
    let d_in = c.d(i - 1);
    let z = d_out.kernel_basis();
    let b = d_in.column_space();
    let both = Matrix::hstack(c.ctx, n, &[&b, &z]);
    let pivots = both.rref().pivots;
    let chosen: Vec<usize> = pivots.into_iter().filter(|&p| p >= b.cols()).map(|p| p - b.cols()).collect();
    let reps = Matrix::from_fn(c.ctx, n, chosen.len(), |r, k| z[(r, chosen[k])].clone());
    let basis = Matrix::hstack(c.ctx, n, &[&b, &reps]);
    let classifier = ColumnBasis::new(basis).expect("boundaries extended by independent cocycles");
    Cohomology {
        degree: i,
        dim: chosen.len(),
        representatives: reps,
        differential: d_out,
        boundary_dim: b.cols(),
        classifier,
    }
}

/// One summand `C^j ⊗ D^k` of a tensor degree, with its offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorBlock {
    pub j: i64,
    pub k: i64,
    pub offset: usize,
    pub dim: usize,
}

pub fn tensor_blocks<F: Field>(c: &Complex<F>, d: &Complex<F>, n: i64) -> Vec<TensorBlock> {
    let mut out = Vec::new();
    let mut offset = 0;
    for j in c.window.degrees() {
        let k = n - j;
        if d.window.contains(k) {
            let dim = c.dim(j) * d.dim(k);
            out.push(TensorBlock { j, k, offset, dim });
            offset += dim;
        }
    }
    out
}

/// `C ⊗ D` with `d(v⊗w) = dv⊗w + (-1)^j v⊗dw`; the basis of `C^j ⊗ D^k` is row-major.
pub fn tensor<F: Field>(c: &Complex<F>, d: &Complex<F>) -> Result<Complex<F>, ComplexError> {
    tensor_capped(c, d, DEFAULT_DIM_CAP)
}

pub fn tensor_capped<F: Field>(c: &Complex<F>, d: &Complex<F>, cap: usize) -> Result<Complex<F>, ComplexError> {
    let ctx = c.ctx;
    let window = Window {
        lo: c.window.lo + d.window.lo,
        hi: c.window.hi + d.window.hi,
    };
    let blocks: Vec<Vec<TensorBlock>> = window.degrees().map(|n| tensor_blocks(c, d, n)).collect();
    let dims: Vec<usize> = blocks.iter().map(|b| b.iter().map(|x| x.dim).sum()).collect();
    let total: usize = dims.iter().sum();
    if total > cap {
        return Err(ComplexError::TooLarge { total, cap });
    }
    let mut diffs = Vec::new();
    for idx in 0..window.len() - 1 {
        let mut m = Matrix::zeros(ctx, dims[idx + 1], dims[idx]);
        let targets = &blocks[idx + 1];
        for b in &blocks[idx] {
            if b.dim == 0 {
                continue;
            }
            if let Some(t) = targets.iter().find(|t| t.j == b.j + 1) {
                let piece = c.d(b.j).kron(&Matrix::identity(ctx, d.dim(b.k)));
                m.set_block(t.offset, b.offset, &piece);
            }
            if let Some(t) = targets.iter().find(|t| t.j == b.j) {
                let piece = Matrix::identity(ctx, c.dim(b.j)).kron(&d.d(b.k)).scale(&F::sign(ctx, b.j));
                m.set_block(t.offset, b.offset, &piece);
            }
        }
        diffs.push(m);
    }
    make_complex_capped(ctx, window, dims, diffs, cap)
}

/// A homogeneous graded map `f = (f^j)` of degree `t`, `f^j: S^j -> T^{t+j}`.
///
/// Components are stored for every `j` with `j` in the source window and
/// `t+j` in the target window, and for no other `j`.
#[derive(Clone, Debug)]
pub struct GradedMap<F: Field> {
    pub source: Arc<Complex<F>>,
    pub target: Arc<Complex<F>>,
    pub degree: i64,
    pub components: BTreeMap<i64, Matrix<F>>,
}

fn same<F: Field>(a: &Arc<Complex<F>>, b: &Arc<Complex<F>>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl<F: Field> GradedMap<F> {
    pub fn admissible(source: &Complex<F>, target: &Complex<F>, degree: i64) -> Vec<i64> {
        source
            .window
            .degrees()
            .filter(|&j| target.window.contains(degree + j))
            .collect()
    }

    pub fn new(
        source: Arc<Complex<F>>,
        target: Arc<Complex<F>>,
        degree: i64,
        components: BTreeMap<i64, Matrix<F>>,
    ) -> Result<Self, ComplexError> {
        let adm = Self::admissible(&source, &target, degree);
        if components.keys().copied().collect::<Vec<_>>() != adm {
            return Err(ComplexError::ShapeMismatch {
                degree,
                detail: "components do not match the admissible blocks".into(),
            });
        }
        for (&j, m) in &components {
            if m.shape() != (target.dim(degree + j), source.dim(j)) {
                return Err(ComplexError::ShapeMismatch {
                    degree: j,
                    detail: "component has the wrong shape".into(),
                });
            }
        }
        Ok(GradedMap {
            source,
            target,
            degree,
            components,
        })
    }

    pub fn zero(source: Arc<Complex<F>>, target: Arc<Complex<F>>, degree: i64) -> Self {
        let ctx = source.ctx;
        let components = Self::admissible(&source, &target, degree)
            .into_iter()
            .map(|j| (j, Matrix::zeros(ctx, target.dim(degree + j), source.dim(j))))
            .collect();
        GradedMap {
            source,
            target,
            degree,
            components,
        }
    }

    pub fn identity(c: Arc<Complex<F>>) -> Self {
        let components = c.window.degrees().map(|j| (j, Matrix::identity(c.ctx, c.dim(j)))).collect();
        GradedMap {
            source: c.clone(),
            target: c,
            degree: 0,
            components,
        }
    }

    pub fn component(&self, j: i64) -> Option<&Matrix<F>> {
        self.components.get(&j)
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(|m| m.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self, ComplexError> {
        if self.degree != other.degree || !same(&self.source, &other.source) || !same(&self.target, &other.target) {
            return Err(ComplexError::ChainMismatch);
        }
        let components = self
            .components
            .iter()
            .map(|(j, m)| (*j, m.add(&other.components[j])))
            .collect();
        Ok(GradedMap {
            components,
            ..self.clone()
        })
    }

    pub fn scale(&self, s: &F) -> Self {
        let components = self.components.iter().map(|(j, m)| (*j, m.scale(s))).collect();
        GradedMap {
            components,
            ..self.clone()
        }
    }

    /// For a degree-0 map: is it a chain map, i.e. is `∂f = 0`?
    pub fn is_cocycle(&self) -> bool {
        apply_partial(self).is_zero()
    }

    /// The map induced on cohomology at degree `i` by a degree-0 chain map,
    /// as a matrix in the representative bases.
    pub fn induced_on_cohomology(&self, i: i64) -> Result<Matrix<F>, ComplexError> {
        if self.degree != 0 || !self.is_cocycle() {
            return Err(ComplexError::ChainMismatch);
        }
        let hs = cohomology(&self.source, i)?;
        let ht = cohomology(&self.target, i)?;
        let ctx = self.source.ctx;
        let mut out = Matrix::zeros(ctx, ht.dim, hs.dim);
        let Some(f) = self.component(i) else {
            return Ok(out);
        };
        for k in 0..hs.dim {
            let img = f.mul_vec(&hs.representative(k));
            let cls = ht.class_of(&img).expect("chain maps send cocycles to cocycles");
            for (r, x) in cls.into_iter().enumerate() {
                out[(r, k)] = x;
            }
        }
        Ok(out)
    }
}

/// `(g∘f)^j = g^{s+j} ∘ f^j` for `f` of degree `s`; blocks whose middle term
/// is outside the window are zero.
pub fn compose<F: Field>(g: &GradedMap<F>, f: &GradedMap<F>) -> Result<GradedMap<F>, ComplexError> {
    if !same(&f.target, &g.source) {
        return Err(ComplexError::ChainMismatch);
    }
    let s = f.degree;
    let degree = s + g.degree;
    let ctx = f.source.ctx;
    let components = GradedMap::admissible(&f.source, &g.target, degree)
        .into_iter()
        .map(|j| {
            let m = match (f.component(j), g.component(s + j)) {
                (Some(fj), Some(gj)) => gj.mul(fj),
                _ => Matrix::zeros(ctx, g.target.dim(degree + j), f.source.dim(j)),
            };
            (j, m)
        })
        .collect();
    Ok(GradedMap {
        source: f.source.clone(),
        target: g.target.clone(),
        degree,
        components,
    })
}

/// `∂f = (d_T^{t+j} f^j - (-1)^t f^{j+1} d_S^j)_j`.
pub fn apply_partial<F: Field>(f: &GradedMap<F>) -> GradedMap<F> {
    let t = f.degree;
    let ctx = f.source.ctx;
    let sign = F::sign(ctx, t + 1);
    let components = GradedMap::admissible(&f.source, &f.target, t + 1)
        .into_iter()
        .map(|j| {
            let mut m = Matrix::zeros(ctx, f.target.dim(t + 1 + j), f.source.dim(j));
            if let Some(fj) = f.component(j) {
                m = m.add(&f.target.d(t + j).mul(fj));
            }
            if let Some(fj1) = f.component(j + 1) {
                m = m.add(&fj1.mul(&f.source.d(j)).scale(&sign));
            }
            (j, m)
        })
        .collect();
    GradedMap {
        source: f.source.clone(),
        target: f.target.clone(),
        degree: t + 1,
        components,
    }
}

/// The Koszul braiding `v⊗w ↦ (-1)^{jk} w⊗v` as a degree-0 map `C⊗D -> D⊗C`.
pub fn braiding<F: Field>(c: &Complex<F>, d: &Complex<F>) -> Result<GradedMap<F>, ComplexError> {
    let ctx = c.ctx;
    let cd = Arc::new(tensor(c, d)?);
    let dc = Arc::new(tensor(d, c)?);
    let mut components = BTreeMap::new();
    for n in cd.window.degrees() {
        let mut m = Matrix::zeros(ctx, dc.dim(n), cd.dim(n));
        let dst = tensor_blocks(d, c, n);
        for b in tensor_blocks(c, d, n) {
            let t = dst.iter().find(|t| t.j == b.k).expect("swapped block exists");
            let s = F::sign(ctx, b.j * b.k);
            let (dc_, dd) = (c.dim(b.j), d.dim(b.k));
            for a in 0..dc_ {
                for w in 0..dd {
                    m[(t.offset + w * dc_ + a, b.offset + a * dd + w)] = s.clone();
                }
            }
        }
        components.insert(n, m);
    }
    GradedMap::new(cd, dc, 0, components)
}

/// One `Hom(S^j, T^{t+j})` block of a Hom-complex degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomBlock {
    pub j: i64,
    pub offset: usize,
    pub rows: usize,
    pub cols: usize,
}

impl HomBlock {
    pub fn dim(&self) -> usize {
        self.rows * self.cols
    }
}

/// `Hom(S, T)` with `∂f = d∘f - (-1)^t f∘d`; a block is the row-major vectorization of `f^j`.
#[derive(Clone, Debug)]
pub struct HomComplex<F: Field> {
    pub source: Arc<Complex<F>>,
    pub target: Arc<Complex<F>>,
    pub complex: Complex<F>,
    blocks: Vec<Vec<HomBlock>>,
}

impl<F: Field> HomComplex<F> {
    pub fn blocks(&self, t: i64) -> &[HomBlock] {
        let w = self.complex.window;
        if w.contains(t) {
            &self.blocks[(t - w.lo) as usize]
        } else {
            &[]
        }
    }

    pub fn to_map(&self, t: i64, v: &[F]) -> GradedMap<F> {
        assert_eq!(v.len(), self.complex.dim(t));
        let ctx = self.complex.ctx;
        let components = self
            .blocks(t)
            .iter()
            .map(|b| {
                let data = v[b.offset..b.offset + b.dim()].to_vec();
                (b.j, Matrix::from_vec(ctx, b.rows, b.cols, data))
            })
            .collect();
        GradedMap {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: t,
            components,
        }
    }

    pub fn from_map(&self, f: &GradedMap<F>) -> Vec<F> {
        let mut v = Vec::with_capacity(self.complex.dim(f.degree));
        for b in self.blocks(f.degree) {
            v.extend(f.components[&b.j].vectorize());
        }
        v
    }
}

pub fn hom_complex<F: Field>(s: &Arc<Complex<F>>, t: &Arc<Complex<F>>) -> Result<HomComplex<F>, ComplexError> {
    hom_complex_capped(s, t, DEFAULT_DIM_CAP)
}

pub fn hom_complex_capped<F: Field>(
    s: &Arc<Complex<F>>,
    t: &Arc<Complex<F>>,
    cap: usize,
) -> Result<HomComplex<F>, ComplexError> {
    let ctx = s.ctx;
    let window = Window {
        lo: t.window.lo - s.window.hi,
        hi: t.window.hi - s.window.lo,
    };
    let mut blocks = Vec::new();
    for deg in window.degrees() {
        let mut off = 0;
        let mut v = Vec::new();
        for j in GradedMap::admissible(s, t, deg) {
            let b = HomBlock {
                j,
                offset: off,
                rows: t.dim(deg + j),
                cols: s.dim(j),
            };
            off += b.dim();
            v.push(b);
        }
        blocks.push(v);
    }
    let dims: Vec<usize> = blocks.iter().map(|v| v.iter().map(|b| b.dim()).sum()).collect();
    let total: usize = dims.iter().sum();
    if total > cap {
        return Err(ComplexError::TooLarge { total, cap });
    }
    let mut diffs = Vec::new();
    for (idx, deg) in (window.lo..window.hi).enumerate() {
        let mut m = Matrix::zeros(ctx, dims[idx + 1], dims[idx]);
        let sign = F::sign(ctx, deg + 1);
        let next = &blocks[idx + 1];
        for b in &blocks[idx] {
            if b.dim() == 0 {
                continue;
            }
            if let Some(tb) = next.iter().find(|x| x.j == b.j) {
                let piece = t.d(deg + b.j).kron(&Matrix::identity(ctx, b.cols));
                m.add_block(tb.offset, b.offset, &piece);
            }
            if let Some(tb) = next.iter().find(|x| x.j == b.j - 1) {
                let piece = Matrix::identity(ctx, b.rows).kron(&s.d(b.j - 1).transpose()).scale(&sign);
                m.add_block(tb.offset, b.offset, &piece);
            }
        }
        diffs.push(m);
    }
    let complex = make_complex_capped(ctx, window, dims, diffs, cap)?;
    Ok(HomComplex {
        source: s.clone(),
        target: t.clone(),
        complex,
        blocks,
    })
}

/// A random complex on `window` with spaces of dimension at most `max_dim`.
///
/// Built as a sum of shifted copies of `k` and `k -> k`, conjugated by random
/// invertible matrices, so `d∘d = 0` holds by construction.
pub fn random_complex<F: Field, R: Rng + ?Sized>(
    ctx: F::Ctx,
    rng: &mut R,
    window: Window,
    max_dim: usize,
) -> Complex<F> {
    let n = window.len();
    let mut dims = vec![0usize; n];
    // pieces: (position, is_pair)
    let mut pieces = Vec::new();
    for pos in 0..n {
        let singles = rng.gen_range(0..=max_dim.min(1));
        for _ in 0..singles {
            if dims[pos] < max_dim {
                dims[pos] += 1;
                pieces.push((pos, false));
            }
        }
        if pos + 1 < n && rng.gen_bool(0.6) && dims[pos] < max_dim && dims[pos + 1] < max_dim {
            dims[pos] += 1;
            dims[pos + 1] += 1;
            pieces.push((pos, true));
        }
    }
    // Index of each piece's basis vector in each degree.
    let mut fill = vec![0usize; n];
    let mut slots = Vec::new();
    for &(pos, pair) in &pieces {
        let a = fill[pos];
        fill[pos] += 1;
        let b = if pair {
            let b = fill[pos + 1];
            fill[pos + 1] += 1;
            Some(b)
        } else {
            None
        };
        slots.push((pos, a, b));
    }
    let gs: Vec<Matrix<F>> = dims.iter().map(|&d| random_invertible(ctx, rng, d)).collect();
    let mut diffs = Vec::new();
    for pos in 0..n.saturating_sub(1) {
        let mut d0 = Matrix::zeros(ctx, dims[pos + 1], dims[pos]);
        for &(p, a, b) in &slots {
            if p == pos {
                if let Some(b) = b {
                    d0[(b, a)] = F::one(ctx);
                }
            }
        }
        let ginv = gs[pos].inverse().expect("invertible by construction");
        diffs.push(gs[pos + 1].mul(&d0).mul(&ginv));
    }
    make_complex_capped(ctx, window, dims, diffs, usize::MAX).expect("d∘d = 0 by construction")
}

pub fn random_invertible<F: Field, R: Rng + ?Sized>(ctx: F::Ctx, rng: &mut R, n: usize) -> Matrix<F> {
    loop {
        let m = Matrix::from_fn(ctx, n, n, |_, _| F::random(ctx, rng));
        if m.is_invertible() {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Prime};

    fn p() -> Prime {
        Prime::DEFAULT
    }

    fn one_by_one(x: i64) -> Matrix<Fp> {
        Matrix::from_i64(p(), &[vec![x]])
    }

    fn contractible(lo: i64) -> Complex<Fp> {
        make_complex(p(), Window::new(lo, lo + 1).unwrap(), vec![1, 1], vec![one_by_one(1)]).unwrap()
    }

    #[test]
    fn single_k_has_h0() {
        let c = make_complex(
            p(),
            Window::new(-1, 1).unwrap(),
            vec![0, 1, 0],
            vec![Matrix::<Fp>::zeros(p(), 1, 0), Matrix::zeros(p(), 0, 1)],
        )
        .unwrap();
        assert_eq!(cohomology(&c, 0).unwrap().dim, 1);
    }

    #[test]
    fn contractible_is_acyclic() {
        let c = contractible(0).widen(Window::new(-1, 2).unwrap());
        assert_eq!(cohomology(&c, 0).unwrap().dim, 0);
        assert_eq!(cohomology(&c, 1).unwrap().dim, 0);
    }

    #[test]
    fn square_nonzero_is_rejected() {
        let err = make_complex(
            p(),
            Window::new(0, 2).unwrap(),
            vec![1, 1, 1],
            vec![one_by_one(1), one_by_one(1)],
        )
        .unwrap_err();
        assert_eq!(err, ComplexError::SquareNonZero { degree: 0 });
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let err = make_complex(p(), Window::new(0, 1).unwrap(), vec![1, 2], vec![one_by_one(1)]).unwrap_err();
        assert!(matches!(err, ComplexError::ShapeMismatch { .. }));
    }

    #[test]
    fn zero_differentials_keep_everything() {
        let c = make_complex(
            p(),
            Window::new(0, 2).unwrap(),
            vec![1, 1, 1],
            vec![one_by_one(0), one_by_one(0)],
        )
        .unwrap();
        assert_eq!(cohomology(&c, 1).unwrap().dim, 1);
    }

    #[test]
    fn edge_degree_is_an_error() {
        let c = contractible(0);
        assert!(matches!(cohomology(&c, 0), Err(ComplexError::EdgeDegree { .. })));
    }

    #[test]
    fn shift_conventions() {
        let c = contractible(0);
        assert_eq!(shift(&c, 0), c);
        let k = Complex::<Fp>::concentrated(p(), 0, 1);
        assert_eq!(shift(&k, 1).window(), Window::new(-1, -1).unwrap());
        let s = shift(&c, 1);
        assert_eq!(s.d(-1), one_by_one(-1));
        assert_eq!(shift(&s, -1), c);
    }

    #[test]
    fn tensor_with_unit() {
        let k = Complex::<Fp>::concentrated(p(), 0, 1);
        let c = contractible(-1);
        assert_eq!(tensor(&k, &c).unwrap(), c);
    }

    #[test]
    fn tensor_of_two_contractibles() {
        let c = contractible(0);
        let t = tensor(&c, &c).unwrap();
        assert_eq!((t.dim(0), t.dim(1), t.dim(2)), (1, 2, 1));
        assert!(t.d(1).mul(&t.d(0)).is_zero());
        assert!(!t.d(0).is_zero());
    }

    #[test]
    fn tensor_with_k_in_degree_one() {
        let c = contractible(0);
        let k1 = Complex::<Fp>::concentrated(p(), 1, 1);
        let t = tensor(&c, &k1).unwrap();
        assert_eq!(t.window(), Window::new(1, 2).unwrap());
        assert_eq!(t.d(1), c.d(0));
    }

    #[test]
    fn hom_from_unit_is_target() {
        let k = Arc::new(Complex::<Fp>::concentrated(p(), 0, 1));
        let c = Arc::new(contractible(0));
        let h = hom_complex(&k, &c).unwrap();
        assert_eq!(h.complex, *c);
    }

    #[test]
    fn hom_between_contractibles_is_acyclic() {
        let c = Arc::new(contractible(0));
        let h = hom_complex(&c, &c).unwrap();
        assert_eq!(h.complex.window(), Window::new(-1, 1).unwrap());
        assert_eq!(cohomology(&h.complex, 0).unwrap().dim, 0);
        // Cocycles (a, a) in degree 0 are boundaries of degree -1 maps.
        let id = GradedMap::identity(c.clone());
        assert!(id.is_cocycle());
        let coh = cohomology(&h.complex, 0).unwrap();
        assert!(coh.is_coboundary(&h.from_map(&id)));
    }

    #[test]
    fn zero_cocycles_are_chain_maps() {
        let c = Arc::new(contractible(0));
        let h = hom_complex(&c, &c).unwrap();
        let z = h.complex.d(0).kernel_basis();
        for k in 0..z.cols() {
            let f = h.to_map(0, &z.column(k));
            for j in 0..1 {
                let lhs = c.d(j).mul(f.component(j).unwrap());
                let rhs = f.component(j + 1).unwrap().mul(&c.d(j));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn compose_with_identity() {
        let c = Arc::new(contractible(0));
        let h = hom_complex(&c, &c).unwrap();
        let f = h.to_map(-1, &[Fp::new(p(), 5)]);
        let id = GradedMap::identity(c.clone());
        let g = compose(&id, &f).unwrap();
        assert_eq!(g.components, f.components);
    }

    #[test]
    fn degree_one_composites_shift_the_index() {
        let ctx = p();
        let c = Arc::new(
            make_complex(ctx, Window::new(0, 2).unwrap(), vec![1, 1, 1], vec![one_by_one(0), one_by_one(0)]).unwrap(),
        );
        let f = GradedMap::new(
            c.clone(),
            c.clone(),
            1,
            [(0, one_by_one(2)), (1, one_by_one(3))].into_iter().collect(),
        )
        .unwrap();
        let g = compose(&f, &f).unwrap();
        assert_eq!(g.degree, 2);
        // (f∘f)^0 = f^1 f^0
        assert_eq!(g.component(0).unwrap(), &one_by_one(6));
    }

    #[test]
    fn partial_of_a_homotopy() {
        let c = Arc::new(contractible(0));
        let h = GradedMap::new(c.clone(), c.clone(), -1, [(1, one_by_one(1))].into_iter().collect()).unwrap();
        let dh = apply_partial(&h);
        // (∂h)^0 = h^1 d^0, (∂h)^1 = d^0 h^1
        assert_eq!(dh.component(0).unwrap(), &one_by_one(1));
        assert_eq!(dh.component(1).unwrap(), &one_by_one(1));
        assert!(apply_partial(&dh).is_zero());
        let zero = GradedMap::zero(c.clone(), c, 0);
        assert!(apply_partial(&zero).is_zero());
    }

    #[test]
    fn hom_differential_matches_partial() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let s = Arc::new(random_complex::<Fp, _>(p(), &mut rng, Window::new(-1, 1).unwrap(), 2));
            let t = Arc::new(random_complex::<Fp, _>(p(), &mut rng, Window::new(0, 2).unwrap(), 2));
            let h = hom_complex(&s, &t).unwrap();
            for deg in h.complex.window().lo..h.complex.window().hi {
                let n = h.complex.dim(deg);
                let v: Vec<Fp> = (0..n).map(|_| Fp::random(p(), &mut rng)).collect();
                let f = h.to_map(deg, &v);
                assert_eq!(h.from_map(&apply_partial(&f)), h.complex.d(deg).mul_vec(&v));
            }
        }
    }
}
