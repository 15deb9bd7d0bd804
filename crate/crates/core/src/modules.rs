//! Right modules over a finite-dimensional category.
//!
//! A [`Rep`] assigns a space `M(q)` to every object and to every basis
//! morphism `y: s -> t` a matrix `M(y): M(t) -> M(s)`, with
//! `M(y∘x) = M(x) M(y)`.

use std::sync::Arc;

use rand::Rng;

use crate::error::ModuleError;
use crate::field::Field;
use crate::linalg::{ColumnBasis, Matrix};
use crate::presentations::FDCategory;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rep<F: Field> {
    cat: Arc<FDCategory<F>>,
    dims: Vec<usize>,
    // act[s*n+t][i] is M(y_i) for the i-th basis morphism y_i: s -> t
    act: Vec<Vec<Matrix<F>>>,
}

pub fn same_category<F: Field>(a: &Arc<FDCategory<F>>, b: &Arc<FDCategory<F>>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn same_rep<F: Field>(a: &Arc<Rep<F>>, b: &Arc<Rep<F>>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl<F: Field> Rep<F> {
    /// Validated constructor: identities act trivially and composition is respected.
    pub fn new(cat: Arc<FDCategory<F>>, dims: Vec<usize>, act: Vec<Vec<Matrix<F>>>) -> Result<Self, ModuleError> {
        let r = Self::new_unchecked(cat, dims, act)?;
        r.validate()?;
        Ok(r)
    }

    /// Checks shapes only.
    pub fn new_unchecked(cat: Arc<FDCategory<F>>, dims: Vec<usize>, act: Vec<Vec<Matrix<F>>>) -> Result<Self, ModuleError> {
        let n = cat.len();
        if dims.len() != n || act.len() != n * n {
            return Err(ModuleError::Invalid("wrong number of objects".into()));
        }
        for s in 0..n {
            for t in 0..n {
                let list = &act[s * n + t];
                if list.len() != cat.dim(s, t) {
                    return Err(ModuleError::Invalid(format!("expected {} matrices for ({s},{t})", cat.dim(s, t))));
                }
                if list.iter().any(|m| m.shape() != (dims[s], dims[t])) {
                    return Err(ModuleError::Invalid(format!("action of a morphism {s}->{t} has the wrong shape")));
                }
            }
        }
        Ok(Rep { cat, dims, act })
    }

    pub fn validate(&self) -> Result<(), ModuleError> {
        let n = self.cat.len();
        let ctx = self.cat.ctx();
        for q in 0..n {
            if self.action_of(q, q, self.cat.unit(q)) != Matrix::identity(ctx, self.dims[q]) {
                return Err(ModuleError::Invalid(format!("identity of object {q} does not act trivially")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for gi in 0..self.cat.dim(b, c) {
                        for fi in 0..self.cat.dim(a, b) {
                            let gf = self.cat.compose_basis(a, b, c, gi, fi);
                            let lhs = self.action_of(a, c, gf);
                            let rhs = self.action(a, b, fi).mul(self.action(b, c, gi));
                            if lhs != rhs {
                                return Err(ModuleError::Invalid(format!(
                                    "M(g∘f) ≠ M(f)M(g) for g = {}, f = {}",
                                    self.cat.labels(b, c)[gi],
                                    self.cat.labels(a, b)[fi]
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn cat(&self) -> &Arc<FDCategory<F>> {
        &self.cat
    }

    pub fn ctx(&self) -> F::Ctx {
        self.cat.ctx()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, q: usize) -> usize {
        self.dims[q]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// `M(y_i)` for the basis morphism `y_i: s -> t`.
    pub fn action(&self, s: usize, t: usize, i: usize) -> &Matrix<F> {
        &self.act[s * self.cat.len() + t][i]
    }

    /// `M(y)` for a morphism `y: s -> t` given in coordinates.
    pub fn action_of(&self, s: usize, t: usize, y: &[F]) -> Matrix<F> {
        let mut m = Matrix::zeros(self.ctx(), self.dims[s], self.dims[t]);
        for (i, c) in y.iter().enumerate() {
            if !c.is_zero() {
                m = m.add(&self.action(s, t, i).scale(c));
            }
        }
        m
    }

    /// The zero module.
    pub fn zero(cat: Arc<FDCategory<F>>) -> Self {
        let n = cat.len();
        let act = (0..n * n)
            .map(|st| (0..cat.dim(st / n, st % n)).map(|_| Matrix::zeros(cat.ctx(), 0, 0)).collect())
            .collect();
        Rep {
            dims: vec![0; n],
            cat,
            act,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RepMap<F: Field> {
    pub source: Arc<Rep<F>>,
    pub target: Arc<Rep<F>>,
    pub comps: Vec<Matrix<F>>,
}

impl<F: Field> RepMap<F> {
    /// Validated constructor: shapes and naturality.
    pub fn new(source: Arc<Rep<F>>, target: Arc<Rep<F>>, comps: Vec<Matrix<F>>) -> Result<Self, ModuleError> {
        if !same_category(source.cat(), target.cat()) {
            return Err(ModuleError::CategoryMismatch);
        }
        let f = RepMap { source, target, comps };
        f.check_shapes()?;
        if !f.is_natural() {
            return Err(ModuleError::Invalid("components are not natural".into()));
        }
        Ok(f)
    }

    fn check_shapes(&self) -> Result<(), ModuleError> {
        let n = self.source.cat().len();
        if self.comps.len() != n {
            return Err(ModuleError::Invalid("wrong number of components".into()));
        }
        for q in 0..n {
            if self.comps[q].shape() != (self.target.dim(q), self.source.dim(q)) {
                return Err(ModuleError::Invalid(format!("component at {q} has the wrong shape")));
            }
        }
        Ok(())
    }

    pub fn is_natural(&self) -> bool {
        let cat = self.source.cat();
        let n = cat.len();
        for s in 0..n {
            for t in 0..n {
                for i in 0..cat.dim(s, t) {
                    let lhs = self.target.action(s, t, i).mul(&self.comps[t]);
                    let rhs = self.comps[s].mul(self.source.action(s, t, i));
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn zero(source: Arc<Rep<F>>, target: Arc<Rep<F>>) -> Self {
        let ctx = source.ctx();
        let comps = (0..source.cat().len())
            .map(|q| Matrix::zeros(ctx, target.dim(q), source.dim(q)))
            .collect();
        RepMap { source, target, comps }
    }

    pub fn identity(m: Arc<Rep<F>>) -> Self {
        let comps = m.dims().iter().map(|&d| Matrix::identity(m.ctx(), d)).collect();
        RepMap {
            source: m.clone(),
            target: m,
            comps,
        }
    }

    pub fn compose(&self, f: &RepMap<F>) -> Result<RepMap<F>, ModuleError> {
        if !same_rep(&f.target, &self.source) {
            return Err(ModuleError::NotComposable);
        }
        Ok(self.compose_unchecked(f))
    }

    /// `self ∘ f` without comparing the middle modules.
    pub fn compose_unchecked(&self, f: &RepMap<F>) -> RepMap<F> {
        let comps = self.comps.iter().zip(&f.comps).map(|(g, h)| g.mul(h)).collect();
        RepMap {
            source: f.source.clone(),
            target: self.target.clone(),
            comps,
        }
    }

    pub fn add(&self, other: &RepMap<F>) -> RepMap<F> {
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect();
        RepMap {
            source: self.source.clone(),
            target: self.target.clone(),
            comps,
        }
    }

    pub fn scale(&self, s: &F) -> RepMap<F> {
        RepMap {
            source: self.source.clone(),
            target: self.target.clone(),
            comps: self.comps.iter().map(|m| m.scale(s)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|m| m.is_zero())
    }

    /// Concatenated row-major components.
    pub fn vectorize(&self) -> Vec<F> {
        self.comps.iter().flat_map(|m| m.data().iter().cloned()).collect()
    }

    pub fn from_vector(source: Arc<Rep<F>>, target: Arc<Rep<F>>, v: &[F]) -> RepMap<F> {
        let ctx = source.ctx();
        let mut off = 0;
        let mut comps = Vec::new();
        for q in 0..source.cat().len() {
            let (r, c) = (target.dim(q), source.dim(q));
            comps.push(Matrix::from_vec(ctx, r, c, v[off..off + r * c].to_vec()));
            off += r * c;
        }
        assert_eq!(off, v.len());
        RepMap { source, target, comps }
    }

    pub fn is_injective(&self) -> bool {
        self.comps.iter().all(|m| m.rank() == m.cols())
    }

    pub fn is_surjective(&self) -> bool {
        self.comps.iter().all(|m| m.rank() == m.rows())
    }

    pub fn inverse(&self) -> Option<RepMap<F>> {
        let comps = self.comps.iter().map(|m| m.inverse()).collect::<Option<Vec<_>>>()?;
        Some(RepMap {
            source: self.target.clone(),
            target: self.source.clone(),
            comps,
        })
    }
}

/// A basis of `Hom(M, N)` with a coordinate solver.
#[derive(Clone, Debug)]
pub struct HomSpace<F: Field> {
    pub source: Arc<Rep<F>>,
    pub target: Arc<Rep<F>>,
    pub basis: Vec<RepMap<F>>,
    coords: ColumnBasis<F>,
}

impl<F: Field> HomSpace<F> {
    pub fn new(m: &Arc<Rep<F>>, n: &Arc<Rep<F>>) -> Result<Self, ModuleError> {
        if !same_category(m.cat(), n.cat()) {
            return Err(ModuleError::CategoryMismatch);
        }
        let cat = m.cat();
        let ctx = cat.ctx();
        let k = cat.len();
        let mut offsets = Vec::with_capacity(k + 1);
        let mut total = 0;
        for q in 0..k {
            offsets.push(total);
            total += n.dim(q) * m.dim(q);
        }
        let mut blocks: Vec<Matrix<F>> = Vec::new();
        for s in 0..k {
            for t in 0..k {
                let rows = n.dim(s) * m.dim(t);
                if rows == 0 {
                    continue;
                }
                for i in 0..cat.dim(s, t) {
                    // N(y) f_t - f_s M(y) = 0 for y: s -> t
                    let mut eq = Matrix::zeros(ctx, rows, total);
                    let lhs = n.action(s, t, i).kron(&Matrix::identity(ctx, m.dim(t)));
                    let rhs = Matrix::identity(ctx, n.dim(s)).kron(&m.action(s, t, i).transpose());
                    eq.add_block(0, offsets[t], &lhs);
                    eq.add_block(0, offsets[s], &rhs.neg());
                    if !eq.is_zero() {
                        blocks.push(eq);
                    }
                }
            }
        }
        let refs: Vec<&Matrix<F>> = blocks.iter().collect();
        let system = Matrix::vstack(ctx, total, &refs);
        let kernel = system.kernel_basis();
        let basis = (0..kernel.cols())
            .map(|c| RepMap::from_vector(m.clone(), n.clone(), &kernel.column(c)))
            .collect();
        let coords = ColumnBasis::new(kernel).expect("kernel basis is independent");
        Ok(HomSpace {
            source: m.clone(),
            target: n.clone(),
            basis,
            coords,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coords(&self, f: &RepMap<F>) -> Option<Vec<F>> {
        self.coords.coords(&f.vectorize())
    }

    pub fn coords_of_vector(&self, v: &[F]) -> Option<Vec<F>> {
        self.coords.coords(v)
    }

    pub fn combination(&self, c: &[F]) -> RepMap<F> {
        let mut f = RepMap::zero(self.source.clone(), self.target.clone());
        for (b, x) in self.basis.iter().zip(c) {
            if !x.is_zero() {
                f = f.add(&b.scale(x));
            }
        }
        f
    }
}

pub fn hom_space<F: Field>(m: &Arc<Rep<F>>, n: &Arc<Rep<F>>) -> Result<Vec<RepMap<F>>, ModuleError> {
    Ok(HomSpace::new(m, n)?.basis)
}

/// `Q(-, q)` acting by precomposition.
pub fn representable<F: Field>(cat: &Arc<FDCategory<F>>, q: usize) -> Rep<F> {
    let n = cat.len();
    let ctx = cat.ctx();
    let dims: Vec<usize> = (0..n).map(|v| cat.dim(v, q)).collect();
    let mut act = Vec::with_capacity(n * n);
    for s in 0..n {
        for t in 0..n {
            let list = (0..cat.dim(s, t))
                .map(|i| {
                    // f ↦ f∘y_i for f ∈ Q(t, q)
                    let mut m = Matrix::zeros(ctx, dims[s], dims[t]);
                    for k in 0..dims[t] {
                        for (r, x) in cat.compose_basis(s, t, q, k, i).iter().enumerate() {
                            m[(r, k)] = x.clone();
                        }
                    }
                    m
                })
                .collect();
            act.push(list);
        }
    }
    Rep {
        cat: cat.clone(),
        dims,
        act,
    }
}

/// `k` at `q`, with the radical acting by zero.
pub fn stalk<F: Field>(cat: &Arc<FDCategory<F>>, q: usize) -> Result<Rep<F>, ModuleError> {
    if !cat.is_local_at(q) {
        return Err(ModuleError::NotLocal(q));
    }
    let n = cat.len();
    let ctx = cat.ctx();
    let dims: Vec<usize> = (0..n).map(|v| (v == q) as usize).collect();
    let u = Matrix::column_vector(ctx, cat.unit(q).to_vec());
    let split = ColumnBasis::new(Matrix::hstack(ctx, cat.dim(q, q), &[&u, cat.radical(q, q)])).expect("local endomorphism ring");
    let mut act = Vec::with_capacity(n * n);
    for s in 0..n {
        for t in 0..n {
            let list = (0..cat.dim(s, t))
                .map(|i| {
                    if s == q && t == q {
                        let c = split.coords(&cat.basis_vector(q, q, i)).expect("basis spans");
                        Matrix::from_vec(ctx, 1, 1, vec![c[0].clone()])
                    } else {
                        Matrix::zeros(ctx, dims[s], dims[t])
                    }
                })
                .collect();
            act.push(list);
        }
    }
    Ok(Rep {
        cat: cat.clone(),
        dims,
        act,
    })
}

/// Direct sum with canonical injections and projections.
pub struct DirectSum<F: Field> {
    pub sum: Arc<Rep<F>>,
    pub injections: Vec<RepMap<F>>,
    pub projections: Vec<RepMap<F>>,
}

pub fn direct_sum<F: Field>(cat: &Arc<FDCategory<F>>, parts: &[Arc<Rep<F>>]) -> DirectSum<F> {
    let n = cat.len();
    let ctx = cat.ctx();
    let dims: Vec<usize> = (0..n).map(|q| parts.iter().map(|p| p.dim(q)).sum()).collect();
    let mut act = Vec::with_capacity(n * n);
    for s in 0..n {
        for t in 0..n {
            let list = (0..cat.dim(s, t))
                .map(|i| {
                    let blocks: Vec<&Matrix<F>> = parts.iter().map(|p| p.action(s, t, i)).collect();
                    Matrix::block_diag(ctx, &blocks)
                })
                .collect();
            act.push(list);
        }
    }
    let sum = Arc::new(Rep {
        cat: cat.clone(),
        dims: dims.clone(),
        act,
    });
    let mut injections = Vec::new();
    let mut projections = Vec::new();
    let mut offsets = vec![0usize; n];
    for p in parts {
        let mut inj = Vec::new();
        let mut proj = Vec::new();
        for q in 0..n {
            let mut i = Matrix::zeros(ctx, dims[q], p.dim(q));
            i.set_block(offsets[q], 0, &Matrix::identity(ctx, p.dim(q)));
            proj.push(i.transpose());
            inj.push(i);
            offsets[q] += p.dim(q);
        }
        injections.push(RepMap {
            source: p.clone(),
            target: sum.clone(),
            comps: inj,
        });
        projections.push(RepMap {
            source: sum.clone(),
            target: p.clone(),
            comps: proj,
        });
    }
    DirectSum {
        sum,
        injections,
        projections,
    }
}

/// The submodule spanned objectwise by the (independent) columns of `spans`.
pub fn submodule<F: Field>(m: &Arc<Rep<F>>, spans: Vec<Matrix<F>>) -> Result<(Arc<Rep<F>>, RepMap<F>), ModuleError> {
    let cat = m.cat().clone();
    let n = cat.len();
    let bases: Vec<ColumnBasis<F>> = spans
        .iter()
        .map(|s| ColumnBasis::new(s.clone()).map_err(|e| ModuleError::Invalid(e.to_string())))
        .collect::<Result<_, _>>()?;
    let dims: Vec<usize> = spans.iter().map(|s| s.cols()).collect();
    let mut act = Vec::with_capacity(n * n);
    for s in 0..n {
        for t in 0..n {
            let mut list = Vec::new();
            for i in 0..cat.dim(s, t) {
                let img = m.action(s, t, i).mul(&spans[t]);
                let c = bases[s]
                    .coords_matrix(&img)
                    .ok_or_else(|| ModuleError::Invalid("subspaces are not closed under the action".into()))?;
                list.push(c);
            }
            act.push(list);
        }
    }
    let sub = Arc::new(Rep { cat, dims, act });
    let incl = RepMap {
        source: sub.clone(),
        target: m.clone(),
        comps: spans,
    };
    Ok((sub, incl))
}

/// `M / U` for a submodule given by spanning columns.
pub fn quotient<F: Field>(m: &Arc<Rep<F>>, spans: &[Matrix<F>]) -> Result<(Arc<Rep<F>>, RepMap<F>), ModuleError> {
    let cat = m.cat().clone();
    let n = cat.len();
    let ctx = cat.ctx();
    let mut projs = Vec::with_capacity(n);
    let mut sections = Vec::with_capacity(n);
    for q in 0..n {
        let u = spans[q].column_space();
        let comp = u.complement_indices();
        let d = m.dim(q);
        let sel = Matrix::from_fn(ctx, d, comp.len(), |r, c| if r == comp[c] { F::one(ctx) } else { F::zero(ctx) });
        let full = Matrix::hstack(ctx, d, &[&u, &sel]);
        let inv = full.inverse().expect("subspace plus complement is a basis");
        projs.push(inv.submatrix(u.cols(), 0, comp.len(), d));
        sections.push(sel);
    }
    let dims: Vec<usize> = projs.iter().map(|p| p.rows()).collect();
    let mut act = Vec::with_capacity(n * n);
    for s in 0..n {
        for t in 0..n {
            let list = (0..cat.dim(s, t))
                .map(|i| projs[s].mul(m.action(s, t, i)).mul(&sections[t]))
                .collect();
            act.push(list);
        }
    }
    let quot = Arc::new(Rep { cat, dims, act });
    let proj = RepMap {
        source: m.clone(),
        target: quot.clone(),
        comps: projs,
    };
    if !proj.is_natural() {
        return Err(ModuleError::Invalid("quotient by a non-submodule".into()));
    }
    Ok((quot, proj))
}

pub fn kernel<F: Field>(f: &RepMap<F>) -> (Arc<Rep<F>>, RepMap<F>) {
    let spans = f.comps.iter().map(|c| c.kernel_basis()).collect();
    submodule(&f.source, spans).expect("kernels are submodules")
}

pub fn image<F: Field>(f: &RepMap<F>) -> (Arc<Rep<F>>, RepMap<F>) {
    let spans = f.comps.iter().map(|c| c.column_space()).collect();
    submodule(&f.target, spans).expect("images are submodules")
}

pub fn cokernel<F: Field>(f: &RepMap<F>) -> (Arc<Rep<F>>, RepMap<F>) {
    let spans: Vec<Matrix<F>> = f.comps.iter().map(|c| c.column_space()).collect();
    quotient(&f.target, &spans).expect("images are submodules")
}

/// `rad(M)(q)`: the span of all `M(r)(m)` with `r` radical.
pub fn radical_spans<F: Field>(m: &Rep<F>) -> Vec<Matrix<F>> {
    let cat = m.cat();
    let n = cat.len();
    let ctx = cat.ctx();
    (0..n)
        .map(|q| {
            let mut parts = Vec::new();
            for t in 0..n {
                for r in cat.radical(q, t).columns() {
                    parts.push(m.action_of(q, t, &r));
                }
            }
            let refs: Vec<&Matrix<F>> = parts.iter().collect();
            Matrix::hstack(ctx, m.dim(q), &refs).column_space()
        })
        .collect()
}

/// `soc(M)(q)`: vectors killed by every radical morphism.
pub fn socle_spans<F: Field>(m: &Rep<F>) -> Vec<Matrix<F>> {
    let cat = m.cat();
    let n = cat.len();
    let ctx = cat.ctx();
    (0..n)
        .map(|q| {
            let mut parts = Vec::new();
            for s in 0..n {
                for r in cat.radical(s, q).columns() {
                    parts.push(m.action_of(s, q, &r));
                }
            }
            let refs: Vec<&Matrix<F>> = parts.iter().collect();
            Matrix::vstack(ctx, m.dim(q), &refs).kernel_basis()
        })
        .collect()
}

pub fn top<F: Field>(m: &Arc<Rep<F>>) -> (Arc<Rep<F>>, RepMap<F>) {
    quotient(m, &radical_spans(m)).expect("the radical is a submodule")
}

pub fn socle<F: Field>(m: &Arc<Rep<F>>) -> (Arc<Rep<F>>, RepMap<F>) {
    submodule(m, socle_spans(m)).expect("the socle is a submodule")
}

/// A direct sum of representables with its summand labels, in order.
pub fn sum_of_representables<F: Field>(cat: &Arc<FDCategory<F>>, summands: &[usize]) -> Arc<Rep<F>> {
    let parts: Vec<Arc<Rep<F>>> = summands.iter().map(|&q| Arc::new(representable(cat, q))).collect();
    direct_sum(cat, &parts).sum
}

/// The map `⊕ Q(-, q_i) -> N` sending `id_{q_i}` to `elems[i] ∈ N(q_i)`.
pub fn yoneda_map<F: Field>(p: &Arc<Rep<F>>, summands: &[usize], n: &Arc<Rep<F>>, elems: &[Vec<F>]) -> RepMap<F> {
    let cat = p.cat();
    let ctx = cat.ctx();
    let k = cat.len();
    let comps = (0..k)
        .map(|v| {
            let mut m = Matrix::zeros(ctx, n.dim(v), p.dim(v));
            let mut col = 0;
            for (i, &q) in summands.iter().enumerate() {
                for x in 0..cat.dim(v, q) {
                    let img = n.action(v, q, x).mul_vec(&elems[i]);
                    for (r, val) in img.into_iter().enumerate() {
                        m[(r, col)] = val;
                    }
                    col += 1;
                }
            }
            m
        })
        .collect();
    RepMap {
        source: p.clone(),
        target: n.clone(),
        comps,
    }
}

#[derive(Clone, Debug)]
pub struct ProjectiveCover<F: Field> {
    pub projective: Arc<Rep<F>>,
    pub summands: Vec<usize>,
    pub epi: RepMap<F>,
}

/// Minimal cover: one representable per basis vector of the top.
pub fn projective_cover<F: Field>(m: &Arc<Rep<F>>) -> ProjectiveCover<F> {
    let cat = m.cat();
    let ctx = cat.ctx();
    let rad = radical_spans(m);
    let mut summands = Vec::new();
    let mut elems = Vec::new();
    for q in 0..cat.len() {
        for c in rad[q].complement_indices() {
            let mut e = vec![F::zero(ctx); m.dim(q)];
            e[c] = F::one(ctx);
            summands.push(q);
            elems.push(e);
        }
    }
    let projective = sum_of_representables(cat, &summands);
    let epi = yoneda_map(&projective, &summands, m, &elems);
    ProjectiveCover {
        projective,
        summands,
        epi,
    }
}

/// For each object `q`, an object `v` whose representable has socle `S_q`.
pub fn socle_permutation<F: Field>(cat: &Arc<FDCategory<F>>) -> Result<Vec<usize>, ModuleError> {
    let n = cat.len();
    let mut inv = vec![None; n];
    for v in 0..n {
        let p = representable(cat, v);
        let soc = socle_spans(&p);
        let support: Vec<usize> = (0..n).filter(|&q| soc[q].cols() > 0).collect();
        if support.len() == 1 && soc[support[0]].cols() == 1 {
            inv[support[0]].get_or_insert(v);
        }
    }
    inv.into_iter()
        .enumerate()
        .map(|(q, v)| v.ok_or(ModuleError::NotSelfInjective { stalk: q, projective: q }))
        .collect()
}

#[derive(Clone, Debug)]
pub struct InjectiveEnvelope<F: Field> {
    pub injective: Arc<Rep<F>>,
    pub summands: Vec<usize>,
    pub mono: RepMap<F>,
}

/// Minimal envelope by representables, valid when representables are injective.
///
/// Each socle basis vector at `q` is detected by a map into the representable
/// whose socle is `S_q`; such maps are chosen from `Hom(M, P_v)` so that their
/// restrictions to the socle are independent.
pub fn injective_envelope<F: Field>(m: &Arc<Rep<F>>) -> Result<InjectiveEnvelope<F>, ModuleError> {
    let cat = m.cat();
    let ctx = cat.ctx();
    let nu = socle_permutation(cat)?;
    let soc = socle_spans(m);
    let mut summands = Vec::new();
    let mut maps: Vec<RepMap<F>> = Vec::new();
    for q in 0..cat.len() {
        let r = soc[q].cols();
        if r == 0 {
            continue;
        }
        let v = nu[q];
        let pv = Arc::new(representable(cat, v));
        let sv = socle_spans(&pv)[q].clone();
        let line = ColumnBasis::new(sv).expect("socle line");
        let homs = hom_space(m, &pv)?;
        let mut functionals: Vec<Vec<F>> = Vec::new();
        let mut chosen = Vec::new();
        for h in homs {
            let restricted = h.comps[q].mul(&soc[q]);
            let phi: Vec<F> = (0..r)
                .map(|c| line.coords(&restricted.column(c)).expect("maps preserve socles")[0].clone())
                .collect();
            let mut trial = functionals.clone();
            trial.push(phi.clone());
            if Matrix::from_columns(ctx, r, &trial).rank() == trial.len() {
                functionals = trial;
                chosen.push(h);
                if chosen.len() == r {
                    break;
                }
            }
        }
        if chosen.len() < r {
            return Err(ModuleError::NotSelfInjective { stalk: q, projective: v });
        }
        for h in chosen {
            summands.push(v);
            maps.push(h);
        }
    }
    let injective = sum_of_representables(cat, &summands);
    let comps = (0..cat.len())
        .map(|q| {
            let refs: Vec<&Matrix<F>> = maps.iter().map(|h| &h.comps[q]).collect();
            Matrix::vstack(ctx, m.dim(q), &refs)
        })
        .collect();
    let mono = RepMap {
        source: m.clone(),
        target: injective.clone(),
        comps,
    };
    if !mono.is_injective() {
        return Err(ModuleError::Invalid("envelope map is not injective".into()));
    }
    Ok(InjectiveEnvelope {
        injective,
        summands,
        mono,
    })
}

/// `ΩM` with its inclusion into the cover, and the cover itself.
pub fn syzygy<F: Field>(m: &Arc<Rep<F>>) -> (Arc<Rep<F>>, RepMap<F>, ProjectiveCover<F>) {
    let cover = projective_cover(m);
    let (k, incl) = kernel(&cover.epi);
    (k, incl, cover)
}

/// `Ω^{-1}M` with its projection from the envelope, and the envelope itself.
pub fn cosyzygy<F: Field>(m: &Arc<Rep<F>>) -> Result<(Arc<Rep<F>>, RepMap<F>, InjectiveEnvelope<F>), ModuleError> {
    let env = injective_envelope(m)?;
    let (c, proj) = cokernel(&env.mono);
    Ok((c, proj, env))
}

fn span_rank<F: Field>(ctx: F::Ctx, ambient: usize, vectors: &[Vec<F>]) -> Matrix<F> {
    Matrix::from_columns(ctx, ambient, vectors).column_space()
}

/// `Hom(M, N)` modulo maps factoring through a projective.
#[derive(Clone, Debug)]
pub struct StableHom<F: Field> {
    pub dim: usize,
    pub hom: HomSpace<F>,
    /// Coset representatives whose classes form a basis.
    pub representatives: Vec<RepMap<F>>,
    factoring_dim: usize,
    classifier: ColumnBasis<F>,
}

impl<F: Field> StableHom<F> {
    /// Class coordinates of a map `M -> N`, or `None` if it is not natural.
    pub fn class_of(&self, f: &RepMap<F>) -> Option<Vec<F>> {
        let c = self.hom.coords(f)?;
        Some(self.classifier.coords(&c).expect("spans Hom")[self.factoring_dim..].to_vec())
    }

    pub fn factors_through_projective(&self, f: &RepMap<F>) -> bool {
        self.class_of(f).is_some_and(|c| c.iter().all(|x| x.is_zero()))
    }
}

pub fn stable_hom<F: Field>(m: &Arc<Rep<F>>, n: &Arc<Rep<F>>) -> Result<StableHom<F>, ModuleError> {
    let hom = HomSpace::new(m, n)?;
    let ctx = m.ctx();
    let cover = projective_cover(n);
    let through = hom_space(m, &cover.projective)?;
    let vecs: Vec<Vec<F>> = through
        .iter()
        .map(|h| hom.coords(&cover.epi.compose_unchecked(h)).expect("composite is natural"))
        .collect();
    let factoring = span_rank(ctx, hom.dim(), &vecs);
    let comp = factoring.complement_indices();
    let sel = Matrix::from_fn(ctx, hom.dim(), comp.len(), |r, c| if r == comp[c] { F::one(ctx) } else { F::zero(ctx) });
    let classifier = ColumnBasis::new(Matrix::hstack(ctx, hom.dim(), &[&factoring, &sel])).expect("complement");
    let representatives = comp.iter().map(|&c| hom.basis[c].clone()).collect();
    Ok(StableHom {
        dim: comp.len(),
        representatives,
        factoring_dim: factoring.cols(),
        classifier,
        hom,
    })
}

/// The same dimension computed through the injective envelope of the source.
pub fn stable_hom_dim_via_envelope<F: Field>(m: &Arc<Rep<F>>, n: &Arc<Rep<F>>) -> Result<usize, ModuleError> {
    let hom = HomSpace::new(m, n)?;
    let env = injective_envelope(m)?;
    let through = hom_space(&env.injective, n)?;
    let vecs: Vec<Vec<F>> = through
        .iter()
        .map(|h| hom.coords(&h.compose_unchecked(&env.mono)).expect("composite is natural"))
        .collect();
    Ok(hom.dim() - span_rank(m.ctx(), hom.dim(), &vecs).cols())
}

pub fn ext1<F: Field>(m: &Arc<Rep<F>>, n: &Arc<Rep<F>>) -> Result<usize, ModuleError> {
    if !same_category(m.cat(), n.cat()) {
        return Err(ModuleError::CategoryMismatch);
    }
    let (k, incl, cover) = syzygy(m);
    let on_k = HomSpace::new(&k, n)?;
    let from_p = hom_space(&cover.projective, n)?;
    let vecs: Vec<Vec<F>> = from_p
        .iter()
        .map(|h| on_k.coords(&h.compose_unchecked(&incl)).expect("restriction is natural"))
        .collect();
    Ok(on_k.dim() - span_rank(m.ctx(), on_k.dim(), &vecs).cols())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfInjectivity {
    pub self_injective: bool,
    /// `(q', q)` with `Ext^1(S_{q'}, Q(-, q)) ≠ 0`.
    pub witness: Option<(usize, usize)>,
}

pub fn check_self_injective<F: Field>(cat: &Arc<FDCategory<F>>) -> Result<SelfInjectivity, ModuleError> {
    let n = cat.len();
    let stalks: Vec<Arc<Rep<F>>> = (0..n).map(|q| stalk(cat, q).map(Arc::new)).collect::<Result<_, _>>()?;
    for q in 0..n {
        let p = Arc::new(representable(cat, q));
        for (qq, s) in stalks.iter().enumerate() {
            if ext1(s, &p)? != 0 {
                return Ok(SelfInjectivity {
                    self_injective: false,
                    witness: Some((qq, q)),
                });
            }
        }
    }
    Ok(SelfInjectivity {
        self_injective: true,
        witness: None,
    })
}

pub fn require_self_injective<F: Field>(cat: &Arc<FDCategory<F>>) -> Result<(), ModuleError> {
    let r = check_self_injective(cat)?;
    match r.witness {
        None => Ok(()),
        Some((stalk, projective)) => Err(ModuleError::NotSelfInjective { stalk, projective }),
    }
}

/// An isomorphism together with its inverse.
#[derive(Clone, Debug)]
pub struct Isomorphism<F: Field> {
    pub forward: RepMap<F>,
    pub backward: RepMap<F>,
}

impl<F: Field> Isomorphism<F> {
    pub fn verify(&self) -> bool {
        let id_s = RepMap::identity(self.forward.source.clone());
        let id_t = RepMap::identity(self.forward.target.clone());
        self.forward.is_natural()
            && self.backward.is_natural()
            && self.backward.compose_unchecked(&self.forward).comps == id_s.comps
            && self.forward.compose_unchecked(&self.backward).comps == id_t.comps
    }
}

pub const DEFAULT_ISO_TRIALS: usize = 16;

/// Randomized search for an isomorphism in `Hom(M, N)`.
///
/// `Some` always carries a verified certificate. `None` means the dimension
/// vectors differ or no trial produced an invertible map; for isomorphic
/// modules a random map fails with probability at most about `dim/p`, so the
/// chance of a false `None` is roughly `(dim/p)^trials`.
pub fn is_isomorphic<F: Field, R: Rng + ?Sized>(
    m: &Arc<Rep<F>>,
    n: &Arc<Rep<F>>,
    rng: &mut R,
    trials: usize,
) -> Result<Option<Isomorphism<F>>, ModuleError> {
    if !same_category(m.cat(), n.cat()) {
        return Err(ModuleError::CategoryMismatch);
    }
    if m.dims() != n.dims() {
        return Ok(None);
    }
    let hom = HomSpace::new(m, n)?;
    let ctx = m.ctx();
    for trial in 0..trials {
        let c: Vec<F> = if trial == 0 && Arc::ptr_eq(m, n) {
            // the identity is the obvious first guess for M vs M
            hom.coords(&RepMap::identity(m.clone())).expect("identity is natural")
        } else {
            (0..hom.dim()).map(|_| F::random(ctx, rng)).collect()
        };
        let f = hom.combination(&c);
        if let Some(g) = f.inverse() {
            let iso = Isomorphism { forward: f, backward: g };
            if iso.verify() {
                return Ok(Some(iso));
            }
        }
    }
    Ok(None)
}

/// Right multiplication `R_b: a ↦ a∘b` on a single-object algebra.
pub fn right_multiplication<F: Field>(a: &FDCategory<F>, b: &[F]) -> Matrix<F> {
    let d = a.dim(0, 0);
    let mut m = Matrix::zeros(a.ctx(), d, d);
    for k in 0..d {
        let col = a.compose(0, 0, 0, &a.basis_vector(0, 0, k), b);
        for (r, x) in col.into_iter().enumerate() {
            m[(r, k)] = x;
        }
    }
    m
}

/// Left multiplication `L_b: a ↦ b∘a` on a single-object algebra.
pub fn left_multiplication<F: Field>(a: &FDCategory<F>, b: &[F]) -> Matrix<F> {
    let d = a.dim(0, 0);
    let mut m = Matrix::zeros(a.ctx(), d, d);
    for k in 0..d {
        let col = a.compose(0, 0, 0, b, &a.basis_vector(0, 0, k));
        for (r, x) in col.into_iter().enumerate() {
            m[(r, k)] = x;
        }
    }
    m
}

/// `A ⊗ M` over `A ⊗ Q`: `(b ⊗ y)` acts by `R_b ⊗ M(y)`.
pub fn tensor_algebra_module<F: Field>(a: &FDCategory<F>, aq: &Arc<FDCategory<F>>, m: &Rep<F>) -> Result<Rep<F>, ModuleError> {
    let q = m.cat();
    let n = q.len();
    let da = a.dim(0, 0);
    if aq.len() != n || (0..n * n).any(|st| aq.dim(st / n, st % n) != da * q.dim(st / n, st % n)) {
        return Err(ModuleError::CategoryMismatch);
    }
    let rs: Vec<Matrix<F>> = (0..da).map(|b| right_multiplication(a, &a.basis_vector(0, 0, b))).collect();
    let dims = m.dims().iter().map(|d| d * da).collect();
    let mut act = Vec::with_capacity(n * n);
    for s in 0..n {
        for t in 0..n {
            let dq = q.dim(s, t);
            let list = (0..da * dq).map(|gi| rs[gi / dq].kron(m.action(s, t, gi % dq))).collect();
            act.push(list);
        }
    }
    Ok(Rep {
        cat: aq.clone(),
        dims,
        act,
    })
}

/// `1_A ⊗ f` between modules already transported by [`tensor_algebra_module`].
pub fn tensor_algebra_map<F: Field>(a: &FDCategory<F>, f: &RepMap<F>, source: Arc<Rep<F>>, target: Arc<Rep<F>>) -> RepMap<F> {
    let id = Matrix::identity(a.ctx(), a.dim(0, 0));
    RepMap {
        source,
        target,
        comps: f.comps.iter().map(|c| id.kron(c)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Prime};
    use crate::presentations::{present, split_semisimple, tensor_with_algebra, QuiverPresentation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p() -> Prime {
        Prime::DEFAULT
    }

    fn cyclic2() -> Arc<FDCategory<Fp>> {
        Arc::new(present(p(), &QuiverPresentation::cyclic(2, 2)).unwrap())
    }

    fn cube() -> Arc<FDCategory<Fp>> {
        Arc::new(present(p(), &QuiverPresentation::truncated_polynomial(3)).unwrap())
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn representable_of_two_cyclic() {
        let c = cyclic2();
        let p0 = representable(&c, 0);
        p0.validate().unwrap();
        assert_eq!(p0.dims(), [1, 1]);
        // b: 1 -> 0 acts Q(0,0) -> Q(1,0) sending id to b
        assert_eq!(p0.action(1, 0, 0), &Matrix::from_i64(p(), &[vec![1]]));
        // a: 0 -> 1 acts Q(1,0) -> Q(0,0) sending b to b∘a = 0
        assert!(p0.action(0, 1, 0).is_zero());
    }

    #[test]
    fn representable_of_cube_is_uniserial() {
        let c = cube();
        let p = Arc::new(representable(&c, 0));
        assert_eq!(p.dim(0), 3);
        assert_eq!(radical_spans(&p)[0].cols(), 2);
        assert_eq!(socle_spans(&p)[0].cols(), 1);
    }

    #[test]
    fn yoneda_dimensions() {
        let c = cyclic2();
        let p0 = Arc::new(representable(&c, 0));
        let p1 = Arc::new(representable(&c, 1));
        assert_eq!(hom_space(&p0, &p0).unwrap().len(), 1);
        assert_eq!(hom_space(&p0, &p1).unwrap().len(), c.dim(0, 1));
        let s0 = Arc::new(stalk(&c, 0).unwrap());
        let s1 = Arc::new(stalk(&c, 1).unwrap());
        assert_eq!(hom_space(&s0, &s1).unwrap().len(), 0);
        assert_eq!(hom_space(&p0, &s0).unwrap().len(), 1);
    }

    #[test]
    fn stalk_is_top_of_representable() {
        let c = cube();
        let s = Arc::new(stalk(&c, 0).unwrap());
        assert_eq!(s.dims(), [1]);
        assert!(s.action(0, 0, 1).is_zero());
        let (t, _) = top(&Arc::new(representable(&c, 0)));
        assert!(is_isomorphic(&t, &s, &mut rng(), 4).unwrap().is_some());
    }

    #[test]
    fn stalks_of_two_cyclic() {
        let c = cyclic2();
        let s0 = stalk(&c, 0).unwrap();
        s0.validate().unwrap();
        assert_eq!(s0.dims(), [1, 0]);
    }

    #[test]
    fn cover_of_stalk() {
        let c = cyclic2();
        let s0 = Arc::new(stalk(&c, 0).unwrap());
        let cover = projective_cover(&s0);
        assert_eq!(cover.summands, vec![0]);
        assert!(cover.epi.is_natural() && cover.epi.is_surjective());
        let (k, _, _) = syzygy(&s0);
        let s1 = Arc::new(stalk(&c, 1).unwrap());
        assert!(is_isomorphic(&k, &s1, &mut rng(), 4).unwrap().is_some());
    }

    #[test]
    fn cover_of_projective_is_itself() {
        let c = cyclic2();
        let p1 = Arc::new(representable(&c, 1));
        let cover = projective_cover(&p1);
        assert_eq!(cover.summands, vec![1]);
        assert!(cover.epi.inverse().is_some());
        let (k, _, _) = syzygy(&p1);
        assert!(k.is_zero());
    }

    #[test]
    fn envelope_of_stalk() {
        let c = cyclic2();
        let s0 = Arc::new(stalk(&c, 0).unwrap());
        let env = injective_envelope(&s0).unwrap();
        assert_eq!(env.summands, vec![1]);
        assert!(env.mono.is_natural());
    }

    #[test]
    fn cosyzygy_inverts_syzygy() {
        let c = cyclic2();
        let s0 = Arc::new(stalk(&c, 0).unwrap());
        let (k, _, _) = syzygy(&s0);
        let (back, _, _) = cosyzygy(&k).unwrap();
        assert!(is_isomorphic(&back, &s0, &mut rng(), 4).unwrap().is_some());
    }

    #[test]
    fn stable_homs() {
        let c = cyclic2();
        let s0 = Arc::new(stalk(&c, 0).unwrap());
        let p0 = Arc::new(representable(&c, 0));
        assert_eq!(stable_hom(&s0, &s0).unwrap().dim, 1);
        assert_eq!(stable_hom(&p0, &s0).unwrap().dim, 0);
        assert_eq!(stable_hom_dim_via_envelope(&s0, &s0).unwrap(), 1);
        let q = cube();
        let s = Arc::new(stalk(&q, 0).unwrap());
        let (om, _, _) = syzygy(&s);
        assert_eq!(stable_hom(&om, &s).unwrap().dim, 1);
        assert_eq!(stable_hom_dim_via_envelope(&om, &s).unwrap(), 1);
    }

    #[test]
    fn ext_groups() {
        let c = cyclic2();
        let s0 = Arc::new(stalk(&c, 0).unwrap());
        let s1 = Arc::new(stalk(&c, 1).unwrap());
        let p0 = Arc::new(representable(&c, 0));
        assert_eq!(ext1(&s0, &s1).unwrap(), 1);
        assert_eq!(ext1(&s0, &s0).unwrap(), 0);
        assert_eq!(ext1(&p0, &s1).unwrap(), 0);
    }

    #[test]
    fn self_injectivity() {
        assert!(check_self_injective(&cyclic2()).unwrap().self_injective);
        assert!(check_self_injective(&cube()).unwrap().self_injective);
        let a2 = Arc::new(present::<Fp>(p(), &QuiverPresentation::linear_a2()).unwrap());
        let r = check_self_injective(&a2).unwrap();
        assert!(!r.self_injective);
        let (sq, q) = r.witness.unwrap();
        let s = Arc::new(stalk(&a2, sq).unwrap());
        let pq = Arc::new(representable(&a2, q));
        assert!(ext1(&s, &pq).unwrap() > 0);
    }

    #[test]
    fn isomorphism_search() {
        let c = cyclic2();
        let s0 = Arc::new(stalk(&c, 0).unwrap());
        let s1 = Arc::new(stalk(&c, 1).unwrap());
        let iso = is_isomorphic(&s0, &s0, &mut rng(), 4).unwrap().unwrap();
        assert!(iso.verify());
        assert!(is_isomorphic(&s0, &s1, &mut rng(), 4).unwrap().is_none());
    }

    #[test]
    fn tensor_with_dual_numbers() {
        let q = cyclic2();
        let a = present::<Fp>(p(), &QuiverPresentation::truncated_polynomial(2)).unwrap();
        let aq = Arc::new(tensor_with_algebra(&a, &q).unwrap());
        let s0 = stalk(&q, 0).unwrap();
        let as0 = tensor_algebra_module(&a, &aq, &s0).unwrap();
        as0.validate().unwrap();
        assert_eq!(as0.dims(), [2, 0]);
        // d ⊗ id_0 acts by right multiplication by d, which is nilpotent and nonzero
        let x = as0.action(0, 0, 1);
        assert!(!x.is_zero() && x.mul(x).is_zero());
        let ap0 = tensor_algebra_module(&a, &aq, &representable(&q, 0)).unwrap();
        assert_eq!(ap0, representable(&aq, 0));
    }

    #[test]
    fn tensor_with_unit_algebra_is_identity() {
        let q = cyclic2();
        let k = split_semisimple::<Fp>(p(), 1);
        let kq = Arc::new(tensor_with_algebra(&k, &q).unwrap());
        let s0 = stalk(&q, 0).unwrap();
        let ks0 = tensor_algebra_module(&k, &kq, &s0).unwrap();
        assert_eq!(ks0.dims(), s0.dims());
        for st in 0..4 {
            assert_eq!(ks0.action(st / 2, st % 2, 0), s0.action(st / 2, st % 2, 0));
        }
    }

    #[test]
    fn submodule_rejects_non_closed_spans() {
        let c = cyclic2();
        let p0 = Arc::new(representable(&c, 0));
        // k at vertex 0 only: b maps it into P_0(1), so not closed
        let spans = vec![Matrix::identity(p(), 1), Matrix::zeros(p(), 1, 0)];
        assert!(submodule(&p0, spans).is_err());
    }
}
