//! Hom-complexes between windowed resolutions, the comparison maps ψ, φ, ρ,
//! and graded endomorphism rings.
//!
//! Resolutions are truncated before taking Hom: sources keep degrees
//! `[lo + c, hi]`, targets keep `[lo, hi - c]`, with `c = ⌊-lo/2⌋`, on the
//! largest symmetric window `[lo, hi]` inside the one requested. Cohomology is
//! then reliable on [`safe_range`].

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::complexes::{apply_partial, cohomology, make_complex, Cohomology, Complex, GradedMap, Window};
use crate::error::{DgError, ModuleError, ResolutionError};
use crate::field::Field;
use crate::linalg::Matrix;
use crate::modules::{left_multiplication, same_category, HomSpace, RepMap};
use crate::presentations::FDCategory;
use crate::resolutions::{CompleteResolution, ModuleComplex};

/// A graded map between module complexes: `comps[j]: X^j -> Y^{degree + j}`.
#[derive(Clone, Debug)]
pub struct GradedModMap<F: Field> {
    pub degree: i64,
    pub comps: BTreeMap<i64, RepMap<F>>,
}

/// `(g∘f)^j = g^{s+j} ∘ f^j`, dropping `j` where `g^{s+j}` is missing.
pub fn compose_graded<F: Field>(g: &GradedModMap<F>, f: &GradedModMap<F>) -> GradedModMap<F> {
    let comps = f
        .comps
        .iter()
        .filter_map(|(&j, fj)| g.comps.get(&(f.degree + j)).map(|gj| (j, gj.compose_unchecked(fj))))
        .collect();
    GradedModMap {
        degree: f.degree + g.degree,
        comps,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModHomBlock {
    pub j: i64,
    pub offset: usize,
    pub dim: usize,
}

/// `Hom(X, Y)` for complexes of modules. Degree `t` is the sum over `j` of
/// `Hom_Q(X^j, Y^{t+j})`, each block in the coordinates of its [`HomSpace`].
#[derive(Clone, Debug)]
pub struct ModHomComplex<F: Field> {
    pub source: Arc<ModuleComplex<F>>,
    pub target: Arc<ModuleComplex<F>>,
    pub complex: Arc<Complex<F>>,
    blocks: Vec<Vec<ModHomBlock>>,
    homs: HashMap<(i64, i64), Arc<HomSpace<F>>>,
}

impl<F: Field> ModHomComplex<F> {
    pub fn new(source: Arc<ModuleComplex<F>>, target: Arc<ModuleComplex<F>>) -> Result<Self, DgError> {
        if !same_category(source.cat(), target.cat()) {
            return Err(ModuleError::CategoryMismatch.into());
        }
        let ctx = source.cat().ctx();
        let (ws, wt) = (source.window(), target.window());
        let pairs: Vec<(i64, i64)> = ws.degrees().flat_map(|j| wt.degrees().map(move |k| (j, k))).collect();
        let homs: HashMap<(i64, i64), Arc<HomSpace<F>>> = pairs
            .par_iter()
            .map(|&(j, k)| {
                let h = HomSpace::new(source.component(j).expect("in window"), target.component(k).expect("in window"))?;
                Ok(((j, k), Arc::new(h)))
            })
            .collect::<Result<_, ModuleError>>()?;
        let window = Window {
            lo: wt.lo - ws.hi,
            hi: wt.hi - ws.lo,
        };
        let blocks: Vec<Vec<ModHomBlock>> = window
            .degrees()
            .map(|t| {
                let mut off = 0;
                ws.degrees()
                    .filter(|&j| wt.contains(t + j))
                    .map(|j| {
                        let dim = homs[&(j, t + j)].dim();
                        let b = ModHomBlock { j, offset: off, dim };
                        off += dim;
                        b
                    })
                    .collect()
            })
            .collect();
        let dims: Vec<usize> = blocks.iter().map(|v| v.iter().map(|b| b.dim).sum()).collect();
        let mut h = ModHomComplex {
            source,
            target,
            complex: Arc::new(Complex::concentrated(ctx, 0, 0)),
            blocks,
            homs,
        };
        let diffs: Vec<Matrix<F>> = (window.lo..window.hi)
            .into_par_iter()
            .map(|t| h.differential_matrix(window, &dims, t))
            .collect();
        h.complex = Arc::new(make_complex(ctx, window, dims, diffs)?);
        Ok(h)
    }

    fn differential_matrix(&self, window: Window, dims: &[usize], t: i64) -> Matrix<F> {
        let ctx = self.source.cat().ctx();
        let idx = (t - window.lo) as usize;
        let mut m = Matrix::<F>::zeros(ctx, dims[idx + 1], dims[idx]);
        let next = &self.blocks[idx + 1];
        let sign = F::sign(ctx, t + 1);
        for b in &self.blocks[idx] {
            let hs = &self.homs[&(b.j, t + b.j)];
            let up = next.iter().find(|x| x.j == b.j).zip(self.target.d(t + b.j));
            let down = next.iter().find(|x| x.j == b.j - 1).zip(self.source.d(b.j - 1));
            for (k, f) in hs.basis.iter().enumerate() {
                if let Some((tb, dy)) = up {
                    let c = self.homs[&(b.j, t + b.j + 1)].coords(&dy.compose_unchecked(f)).expect("natural");
                    for (r, x) in c.into_iter().enumerate() {
                        m[(tb.offset + r, b.offset + k)] = m[(tb.offset + r, b.offset + k)].clone() + x;
                    }
                }
                if let Some((tb, dx)) = down {
                    let c = self.homs[&(b.j - 1, t + b.j)].coords(&f.compose_unchecked(dx)).expect("natural");
                    for (r, x) in c.into_iter().enumerate() {
                        m[(tb.offset + r, b.offset + k)] = m[(tb.offset + r, b.offset + k)].clone() + sign.clone() * x;
                    }
                }
            }
        }
        m
    }

    pub fn window(&self) -> Window {
        self.complex.window()
    }

    pub fn dim(&self, t: i64) -> usize {
        self.complex.dim(t)
    }

    pub fn blocks(&self, t: i64) -> &[ModHomBlock] {
        let w = self.window();
        if w.contains(t) {
            &self.blocks[(t - w.lo) as usize]
        } else {
            &[]
        }
    }

    pub fn block(&self, t: i64, j: i64) -> Option<ModHomBlock> {
        self.blocks(t).iter().find(|b| b.j == j).copied()
    }

    /// `Hom_Q(X^j, Y^k)`.
    pub fn hom(&self, j: i64, k: i64) -> Option<&Arc<HomSpace<F>>> {
        self.homs.get(&(j, k))
    }

    pub fn to_map(&self, t: i64, v: &[F]) -> GradedModMap<F> {
        assert_eq!(v.len(), self.dim(t));
        let comps = self
            .blocks(t)
            .iter()
            .map(|b| (b.j, self.homs[&(b.j, t + b.j)].combination(&v[b.offset..b.offset + b.dim])))
            .collect();
        GradedModMap { degree: t, comps }
    }

    /// Coordinates of `f`; missing components count as zero, extra ones are dropped.
    pub fn from_map(&self, f: &GradedModMap<F>) -> Vec<F> {
        let t = f.degree;
        let ctx = self.source.cat().ctx();
        let mut v = Vec::with_capacity(self.dim(t));
        for b in self.blocks(t) {
            match f.comps.get(&b.j) {
                Some(m) => v.extend(self.homs[&(b.j, t + b.j)].coords(m).expect("components are natural")),
                None => v.extend((0..b.dim).map(|_| F::zero(ctx))),
            }
        }
        v
    }

    pub fn cohomology(&self, t: i64) -> Result<Cohomology<F>, DgError> {
        Ok(cohomology(&self.complex, t)?)
    }

    /// Coordinates of `g∘f` in `self`, for `f ∈ fh` of degree `tf` and `g ∈ gh` of degree `tg`.
    pub fn compose_vectors(&self, gh: &ModHomComplex<F>, tg: i64, g: &[F], fh: &ModHomComplex<F>, tf: i64, f: &[F]) -> Vec<F> {
        self.from_map(&compose_graded(&gh.to_map(tg, g), &fh.to_map(tf, f)))
    }
}

/// The `c` in the truncation scheme for a symmetric window.
pub fn truncation_cut(window: Window) -> i64 {
    (-window.lo).div_euclid(2)
}

pub fn symmetric_part(window: Window) -> Window {
    let r = (-window.lo).min(window.hi).max(0);
    Window { lo: -r, hi: r }
}

/// Degrees where Hom-complex cohomology between truncated resolutions is exact.
pub fn safe_range(window: Window) -> Option<Window> {
    let w = symmetric_part(window);
    let c = truncation_cut(w);
    let (lo, hi) = (1 - c, -w.lo - c - 1);
    (lo <= hi).then_some(Window { lo, hi })
}

pub fn source_truncation<F: Field>(r: &CompleteResolution<F>, window: Window) -> ModuleComplex<F> {
    let w = symmetric_part(window);
    let c = truncation_cut(w);
    r.complex().truncate(Window { lo: w.lo + c, hi: w.hi }).expect("nonempty")
}

pub fn target_truncation<F: Field>(r: &CompleteResolution<F>, window: Window) -> ModuleComplex<F> {
    let w = symmetric_part(window);
    let c = truncation_cut(w);
    r.complex().truncate(Window { lo: w.lo, hi: w.hi - c }).expect("nonempty")
}

/// Resolutions over one category with all Hom-complexes between them.
#[derive(Clone, Debug)]
pub struct DGWindow<F: Field> {
    pub category: Arc<FDCategory<F>>,
    pub objects: Vec<CompleteResolution<F>>,
    pub window: Window,
    pub safe: Window,
    pub sources: Vec<Arc<ModuleComplex<F>>>,
    pub targets: Vec<Arc<ModuleComplex<F>>>,
    homs: BTreeMap<(usize, usize), Arc<ModHomComplex<F>>>,
}

pub fn build_dgp<F: Field>(resolutions: Vec<CompleteResolution<F>>) -> Result<DGWindow<F>, DgError> {
    let first = resolutions.first().ok_or(DgError::WindowMismatch)?;
    let category = first.cat().clone();
    let requested = first.window();
    if resolutions
        .iter()
        .any(|r| r.window() != requested || !same_category(r.cat(), &category))
    {
        return Err(DgError::WindowMismatch);
    }
    let window = symmetric_part(requested);
    let safe = safe_range(window).ok_or(ResolutionError::WindowTooSmall {
        lo: requested.lo,
        hi: requested.hi,
    })?;
    let sources: Vec<_> = resolutions.iter().map(|r| Arc::new(source_truncation(r, window))).collect();
    let targets: Vec<_> = resolutions.iter().map(|r| Arc::new(target_truncation(r, window))).collect();
    let n = resolutions.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let homs = pairs
        .par_iter()
        .map(|&(i, j)| Ok(((i, j), Arc::new(ModHomComplex::new(sources[i].clone(), targets[j].clone())?))))
        .collect::<Result<BTreeMap<_, _>, DgError>>()?;
    Ok(DGWindow {
        category,
        objects: resolutions,
        window,
        safe,
        sources,
        targets,
        homs,
    })
}

impl<F: Field> DGWindow<F> {
    /// `Hom(P X_i, P X_j)`.
    pub fn hom(&self, i: usize, j: usize) -> &Arc<ModHomComplex<F>> {
        &self.homs[&(i, j)]
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn safe_range(&self, _i: usize, _j: usize) -> Window {
        self.safe
    }

    pub fn check_safe(&self, t: i64) -> Result<(), DgError> {
        if self.safe.contains(t) {
            Ok(())
        } else {
            Err(DgError::Unsafe {
                degree: t,
                lo: self.safe.lo,
                hi: self.safe.hi,
            })
        }
    }

    pub fn cohomology_dim(&self, i: usize, j: usize, t: i64) -> Result<usize, DgError> {
        self.check_safe(t)?;
        Ok(self.hom(i, j).cohomology(t)?.dim)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MorphismKind {
    Psi,
    Rho,
    Phi,
}

/// A degree-0 map between Hom-complexes, given degreewise.
#[derive(Clone, Debug)]
pub struct DGMorphismMap<F: Field> {
    pub kind: MorphismKind,
    pub map: GradedMap<F>,
}

impl<F: Field> DGMorphismMap<F> {
    fn assemble(
        kind: MorphismKind,
        source: Arc<Complex<F>>,
        target: Arc<Complex<F>>,
        mut block: impl FnMut(i64) -> Matrix<F>,
    ) -> Result<Self, DgError> {
        let comps = GradedMap::admissible(&source, &target, 0).into_iter().map(|t| (t, block(t))).collect();
        Ok(DGMorphismMap {
            kind,
            map: GradedMap::new(source, target, 0, comps)?,
        })
    }

    /// The matrix in degree `t`; zero where either side vanishes.
    pub fn matrix(&self, t: i64) -> Matrix<F> {
        match self.map.component(t) {
            Some(m) => m.clone(),
            None => Matrix::<F>::zeros(self.map.source.ctx(), self.map.target.dim(t), self.map.source.dim(t)),
        }
    }

    /// Degrees `t` where `d∘f ≠ f∘d` starting from degree `t`.
    pub fn differential_failures(&self) -> Vec<i64> {
        apply_partial(&self.map)
            .components
            .iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(&t, _)| t)
            .collect()
    }

    pub fn commutes_with_differentials(&self) -> bool {
        self.differential_failures().is_empty()
    }

    pub fn is_bijective_at(&self, t: i64) -> bool {
        self.matrix(t).is_invertible()
    }

    pub fn on_cohomology(&self, t: i64) -> Result<Matrix<F>, DgError> {
        Ok(self.map.induced_on_cohomology(t)?)
    }
}

/// ψ: `Hom(σPX, σPY) -> Hom(σPX, Y)`, `f ↦ p0 ∘ f^{-t}`.
#[derive(Clone, Debug)]
pub struct Psi<F: Field> {
    pub source: Arc<ModHomComplex<F>>,
    pub target: Arc<ModHomComplex<F>>,
    pub augmentation: RepMap<F>,
    pub map: DGMorphismMap<F>,
}

pub fn psi_from<F: Field>(source: &Arc<ModHomComplex<F>>, augmentation: &RepMap<F>) -> Result<Psi<F>, DgError> {
    let y = ModuleComplex::concentrated(augmentation.target.clone(), 0);
    let target = Arc::new(ModHomComplex::new(source.source.clone(), Arc::new(y))?);
    let ctx = augmentation.source.ctx();
    let map = DGMorphismMap::assemble(MorphismKind::Psi, source.complex.clone(), target.complex.clone(), |t| {
        let mut m = Matrix::<F>::zeros(ctx, target.dim(t), source.dim(t));
        if let (Some(sb), Some(tb)) = (source.block(t, -t), target.block(t, -t)) {
            let hs = source.hom(-t, 0).expect("block");
            let ht = target.hom(-t, 0).expect("block");
            for (k, f) in hs.basis.iter().enumerate() {
                let c = ht.coords(&augmentation.compose_unchecked(f)).expect("natural");
                for (r, x) in c.into_iter().enumerate() {
                    m[(tb.offset + r, sb.offset + k)] = x;
                }
            }
        }
        m
    })?;
    Ok(Psi {
        source: source.clone(),
        target,
        augmentation: augmentation.clone(),
        map,
    })
}

/// ψ for objects `x`, `y` of a [`DGWindow`], with `p0` of the resolution of `y`.
pub fn psi<F: Field>(dg: &DGWindow<F>, x: usize, y: usize) -> Result<Psi<F>, DgError> {
    psi_from(dg.hom(x, y), dg.objects[y].p0())
}

impl<F: Field> Psi<F> {
    /// `H^t(ψ)` as a matrix in the representative bases of both sides.
    pub fn on_cohomology(&self, t: i64) -> Result<Matrix<F>, DgError> {
        self.map.on_cohomology(t)
    }
}

/// `A ⊗ Hom(X, Y)` with `(a ⊗ f)` at index `α·dim + k`; `A` sits in degree 0.
pub fn algebra_tensor_complex<F: Field>(da: usize, c: &Complex<F>) -> Result<Complex<F>, DgError> {
    let ctx = c.ctx();
    let w = c.window();
    let id = Matrix::<F>::identity(ctx, da);
    let dims = w.degrees().map(|t| da * c.dim(t)).collect();
    let diffs = (w.lo..w.hi).map(|t| id.kron(&c.d(t))).collect();
    Ok(make_complex(ctx, w, dims, diffs)?)
}

/// Hom-complexes with blocks `A ⊗ Hom_Q(X^j, Y^{t+j})`, in coordinates
/// `α·h_j + k` inside block `j`, blocks in the order of the base.
#[derive(Clone, Debug)]
pub struct TransportedHom<F: Field> {
    pub algebra: Arc<FDCategory<F>>,
    pub base: Arc<ModHomComplex<F>>,
    pub complex: Arc<Complex<F>>,
}

impl<F: Field> TransportedHom<F> {
    /// Differential `(a^j ⊗ d∘f^j - (-1)^t a^{j+1} ⊗ f^{j+1}∘d)_j`, assembled
    /// block by block from the base differential.
    pub fn new(algebra: Arc<FDCategory<F>>, base: Arc<ModHomComplex<F>>) -> Result<Self, DgError> {
        let ctx = algebra.ctx();
        let da = algebra.dim(0, 0);
        let w = base.window();
        let id = Matrix::<F>::identity(ctx, da);
        let dims: Vec<usize> = w.degrees().map(|t| da * base.dim(t)).collect();
        let diffs = (w.lo..w.hi)
            .map(|t| {
                let d = base.complex.d(t);
                let mut m = Matrix::<F>::zeros(ctx, da * base.dim(t + 1), da * base.dim(t));
                for sb in base.blocks(t) {
                    for tb in base.blocks(t + 1) {
                        if tb.j != sb.j && tb.j != sb.j - 1 {
                            continue;
                        }
                        let piece = d.submatrix(tb.offset, sb.offset, tb.dim, sb.dim);
                        m.set_block(da * tb.offset, da * sb.offset, &id.kron(&piece));
                    }
                }
                m
            })
            .collect();
        let complex = Arc::new(make_complex(ctx, w, dims, diffs)?);
        Ok(TransportedHom { algebra, base, complex })
    }

    pub fn da(&self) -> usize {
        self.algebra.dim(0, 0)
    }

    /// `(b^{s+j} a^j ⊗ g^{s+j}∘f^j)_j` in the coordinates of `self`.
    pub fn compose_vectors(&self, gh: &TransportedHom<F>, tg: i64, g: &[F], fh: &TransportedHom<F>, tf: i64, f: &[F]) -> Vec<F> {
        let a = &self.algebra;
        let ctx = a.ctx();
        let da = self.da();
        let t = tf + tg;
        let mut out = vec![F::zero(ctx); da * self.base.dim(t)];
        for fb in fh.base.blocks(tf) {
            let mid = tf + fb.j;
            let (Some(gb), Some(ob)) = (gh.base.block(tg, mid), self.base.block(t, fb.j)) else {
                continue;
            };
            let hf = fh.base.hom(fb.j, mid).expect("block");
            let hg = gh.base.hom(mid, tg + mid).expect("block");
            let ho = self.base.hom(fb.j, t + fb.j).expect("block");
            for alpha in 0..da {
                for k in 0..fb.dim {
                    let x = &f[da * fb.offset + alpha * fb.dim + k];
                    if x.is_zero() {
                        continue;
                    }
                    for beta in 0..da {
                        for kk in 0..gb.dim {
                            let y = &g[da * gb.offset + beta * gb.dim + kk];
                            if y.is_zero() {
                                continue;
                            }
                            let prod = a.compose_basis(0, 0, 0, beta, alpha);
                            let hc = ho.coords(&hg.basis[kk].compose_unchecked(&hf.basis[k])).expect("natural");
                            let s = x.clone() * y.clone();
                            for (gamma, pa) in prod.iter().enumerate() {
                                if pa.is_zero() {
                                    continue;
                                }
                                for (m, hm) in hc.iter().enumerate() {
                                    let idx = da * ob.offset + gamma * ob.dim + m;
                                    out[idx] = out[idx].clone() + s.clone() * pa.clone() * hm.clone();
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// The transported dg category over the objects of a [`DGWindow`].
#[derive(Clone, Debug)]
pub struct TransportedDG<F: Field> {
    pub algebra: Arc<FDCategory<F>>,
    homs: BTreeMap<(usize, usize), TransportedHom<F>>,
}

pub fn build_transported<F: Field>(algebra: &Arc<FDCategory<F>>, base: &DGWindow<F>) -> Result<TransportedDG<F>, DgError> {
    if algebra.len() != 1 {
        return Err(DgError::Inconsistent("the algebra must have a single object".into()));
    }
    let n = base.len();
    let mut homs = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            homs.insert((i, j), TransportedHom::new(algebra.clone(), base.hom(i, j).clone())?);
        }
    }
    Ok(TransportedDG {
        algebra: algebra.clone(),
        homs,
    })
}

impl<F: Field> TransportedDG<F> {
    pub fn hom(&self, i: usize, j: usize) -> &TransportedHom<F> {
        &self.homs[&(i, j)]
    }
}

/// φ: `A ⊗ Hom(X, Y) -> G(X, Y)`, `a ⊗ f ↦ (a ⊗ f^j)_j`, a reindexing.
#[derive(Clone, Debug)]
pub struct Phi<F: Field> {
    pub source: Arc<Complex<F>>,
    pub map: DGMorphismMap<F>,
}

pub fn phi<F: Field>(g: &TransportedHom<F>) -> Result<Phi<F>, DgError> {
    let da = g.da();
    let base = &g.base;
    let ctx = g.algebra.ctx();
    let source = Arc::new(algebra_tensor_complex(da, &base.complex)?);
    let map = DGMorphismMap::assemble(MorphismKind::Phi, source.clone(), g.complex.clone(), |t| {
        let n = base.dim(t);
        let mut m = Matrix::<F>::zeros(ctx, da * n, da * n);
        for b in base.blocks(t) {
            for alpha in 0..da {
                for k in 0..b.dim {
                    m[(da * b.offset + alpha * b.dim + k, alpha * n + b.offset + k)] = F::one(ctx);
                }
            }
        }
        m
    })?;
    Ok(Phi { source, map })
}

/// Composition in `A ⊗ Hom`: `(b ⊗ g)∘(a ⊗ f) = (b∘a) ⊗ (g∘f)`, no signs since `A` is in degree 0.
pub fn compose_algebra_tensor<F: Field>(
    a: &FDCategory<F>,
    out: &ModHomComplex<F>,
    gh: &ModHomComplex<F>,
    tg: i64,
    g: &[F],
    fh: &ModHomComplex<F>,
    tf: i64,
    f: &[F],
) -> Vec<F> {
    let ctx = a.ctx();
    let da = a.dim(0, 0);
    let (nf, ng, no) = (fh.dim(tf), gh.dim(tg), out.dim(tf + tg));
    let mut res = vec![F::zero(ctx); da * no];
    for alpha in 0..da {
        let fa = &f[alpha * nf..(alpha + 1) * nf];
        if fa.iter().all(|x| x.is_zero()) {
            continue;
        }
        for beta in 0..da {
            let gb = &g[beta * ng..(beta + 1) * ng];
            if gb.iter().all(|x| x.is_zero()) {
                continue;
            }
            let h = out.compose_vectors(gh, tg, gb, fh, tf, fa);
            for (gamma, pa) in a.compose_basis(0, 0, 0, beta, alpha).iter().enumerate() {
                for (m, x) in h.iter().enumerate() {
                    res[gamma * no + m] = res[gamma * no + m].clone() + pa.clone() * x.clone();
                }
            }
        }
    }
    res
}

/// ρ: `G(X, Y) -> Hom_{A⊗Q}(A⊗X, A⊗Y)`, `a ⊗ f ↦ (b ⊗ x ↦ ab ⊗ f_v(x))`,
/// landing in the directly computed Hom-complex over `A ⊗ Q`.
pub fn rho<F: Field>(g: &TransportedHom<F>, direct: &Arc<ModHomComplex<F>>) -> Result<DGMorphismMap<F>, DgError> {
    let a = &g.algebra;
    let da = g.da();
    let ctx = a.ctx();
    let base = &g.base;
    let lefts: Vec<Matrix<F>> = (0..da).map(|x| left_multiplication(a, &a.basis_vector(0, 0, x))).collect();
    let map = DGMorphismMap::assemble(MorphismKind::Rho, g.complex.clone(), direct.complex.clone(), |t| {
        let mut m = Matrix::<F>::zeros(ctx, direct.dim(t), da * base.dim(t));
        for b in base.blocks(t) {
            let Some(db) = direct.block(t, b.j) else {
                continue;
            };
            let hq = base.hom(b.j, t + b.j).expect("block");
            let hd = direct.hom(b.j, t + b.j).expect("block");
            for (alpha, l) in lefts.iter().enumerate() {
                for (k, f) in hq.basis.iter().enumerate() {
                    let comps = f.comps.iter().map(|c| l.kron(c)).collect();
                    let rf = RepMap {
                        source: hd.source.clone(),
                        target: hd.target.clone(),
                        comps,
                    };
                    let c = hd.coords(&rf).expect("ρ lands in module maps");
                    for (r, x) in c.into_iter().enumerate() {
                        m[(db.offset + r, da * b.offset + alpha * b.dim + k)] = x;
                    }
                }
            }
        }
        m
    })?;
    Ok(map)
}

/// Per-degree comparison of `ψ^{A⊗Q} ∘ ρ ∘ φ` with `ρ' ∘ φ' ∘ (1_A ⊗ ψ^Q)`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct KeySquareDegree {
    pub degree: i64,
    /// Number of entries where the two composites differ.
    pub discrepancy: usize,
}

#[derive(Clone, Debug)]
pub struct KeySquare<F: Field> {
    pub degrees: Vec<KeySquareDegree>,
    pub phi: Phi<F>,
    pub rho: DGMorphismMap<F>,
    pub phi_bottom: Phi<F>,
    pub rho_bottom: DGMorphismMap<F>,
    pub psi_base: Psi<F>,
    pub psi_direct: Psi<F>,
}

impl<F: Field> KeySquare<F> {
    pub fn holds(&self) -> bool {
        self.degrees.iter().all(|d| d.discrepancy == 0)
    }
}

/// Builds every map in the square for objects `x`, `y` and compares both
/// composites degree by degree. `direct` holds `A ⊗` the resolutions of `base`.
pub fn verify_key_square<F: Field>(
    algebra: &Arc<FDCategory<F>>,
    base: &DGWindow<F>,
    transported: &TransportedDG<F>,
    direct: &DGWindow<F>,
    x: usize,
    y: usize,
) -> Result<KeySquare<F>, DgError> {
    let ctx = algebra.ctx();
    let da = algebra.dim(0, 0);
    let g = transported.hom(x, y);
    let phi_top = phi(g)?;
    let rho_top = rho(g, direct.hom(x, y))?;
    let psi_base = psi(base, x, y)?;
    let psi_direct = psi(direct, x, y)?;
    let g_bottom = TransportedHom::new(algebra.clone(), psi_base.target.clone())?;
    let phi_bottom = phi(&g_bottom)?;
    let rho_bottom = rho(&g_bottom, &psi_direct.target)?;
    let id = Matrix::<F>::identity(ctx, da);
    let degrees = base
        .hom(x, y)
        .window()
        .degrees()
        .map(|t| {
            let left = psi_direct.map.matrix(t).mul(&rho_top.matrix(t)).mul(&phi_top.map.matrix(t));
            let right = rho_bottom
                .matrix(t)
                .mul(&phi_bottom.map.matrix(t))
                .mul(&id.kron(&psi_base.map.matrix(t)));
            let discrepancy = left.data().iter().zip(right.data()).filter(|(a, b)| a != b).count();
            KeySquareDegree { degree: t, discrepancy }
        })
        .collect();
    Ok(KeySquare {
        degrees,
        phi: phi_top,
        rho: rho_top,
        phi_bottom,
        rho_bottom,
        psi_base,
        psi_direct,
    })
}

/// Graded endomorphism ring of one object on safe degrees.
#[derive(Clone, Debug)]
pub struct EndRing<F: Field> {
    pub object: usize,
    pub degrees: Vec<i64>,
    pub dims: BTreeMap<i64, usize>,
    /// Coordinates of the identity class in `H^0`.
    pub identity: Vec<F>,
    /// `(s, t) -> [i][k]`: the class of `g_i ∘ f_k` with `g_i ∈ H^s`, `f_k ∈ H^t`.
    pub products: BTreeMap<(i64, i64), Vec<Vec<Vec<F>>>>,
    /// Pairs whose product degree leaves the safe range.
    pub unavailable: Vec<(i64, i64)>,
    /// Structure constants agree when recomputed from perturbed representatives.
    pub representative_independent: bool,
}

impl<F: Field> EndRing<F> {
    /// For one-dimensional `H^s`, `H^t` with `s + t = 0`: the nonzero scalar `λ` with `u·v = λ·1`.
    pub fn unit_scalar(&self, s: i64, t: i64) -> Option<F> {
        if s + t != 0 || self.dims.get(&s) != Some(&1) || self.dims.get(&t) != Some(&1) {
            return None;
        }
        let p = &self.products.get(&(s, t))?[0][0];
        let (k, one) = self.identity.iter().enumerate().find(|(_, x)| !x.is_zero())?;
        let lambda = p[k].clone() * one.inv()?;
        let proportional = p.iter().zip(&self.identity).all(|(a, b)| *a == lambda.clone() * b.clone());
        (proportional && !lambda.is_zero()).then_some(lambda)
    }

    pub fn product_is_zero(&self, s: i64, t: i64) -> Option<bool> {
        self.products
            .get(&(s, t))
            .map(|p| p.iter().flatten().flatten().all(|x| x.is_zero()))
    }
}

/// Transfers classes through ψ: a class of `Hom(σPX, σPX)` is determined by
/// `p0 ∘ f^{-t}` in `Hom(σPX, X)`.
struct ClassTransfer<F: Field> {
    psi: Psi<F>,
    source: BTreeMap<i64, Cohomology<F>>,
    target: BTreeMap<i64, Cohomology<F>>,
    inverse: BTreeMap<i64, Matrix<F>>,
}

impl<F: Field> ClassTransfer<F> {
    fn new(dg: &DGWindow<F>, x: usize) -> Result<Self, DgError> {
        let psi = psi(dg, x, x)?;
        let mut source = BTreeMap::new();
        let mut target = BTreeMap::new();
        let mut inverse = BTreeMap::new();
        for t in dg.safe.degrees() {
            let h = psi.on_cohomology(t)?;
            let inv = h.inverse().ok_or_else(|| DgError::RankDeficient {
                what: "H(ψ)".into(),
                degree: t,
            })?;
            source.insert(t, psi.source.cohomology(t)?);
            target.insert(t, psi.target.cohomology(t)?);
            inverse.insert(t, inv);
        }
        Ok(ClassTransfer {
            psi,
            source,
            target,
            inverse,
        })
    }

    fn class_of_target(&self, t: i64, h: RepMap<F>) -> Result<Vec<F>, DgError> {
        let v = self.psi.target.from_map(&GradedModMap {
            degree: t,
            comps: BTreeMap::from([(-t, h)]),
        });
        let c = self.target[&t]
            .class_of(&v)
            .ok_or_else(|| DgError::Inconsistent(format!("product in degree {t} is not a cocycle")))?;
        Ok(self.inverse[&t].mul_vec(&c))
    }

    /// Class of `g∘f` via `p0 ∘ g^{-s} ∘ f^{-s-t}`.
    fn product(&self, s: i64, g: &[F], t: i64, f: &[F]) -> Result<Vec<F>, DgError> {
        let hom = &self.psi.source;
        let gm = hom.to_map(s, g);
        let fm = hom.to_map(t, f);
        let p0 = &self.psi.augmentation;
        let target = self.psi.target.hom(-s - t, 0).expect("safe degree");
        let h = match (gm.comps.get(&-s), fm.comps.get(&(-s - t))) {
            (Some(gj), Some(fj)) => p0.compose_unchecked(gj).compose_unchecked(fj),
            _ => RepMap::zero(target.source.clone(), target.target.clone()),
        };
        self.class_of_target(s + t, h)
    }
}

pub fn end_ring<F: Field, R: Rng + ?Sized>(dg: &DGWindow<F>, x: usize, degrees: &[i64], rng: &mut R) -> Result<EndRing<F>, DgError> {
    for &t in degrees {
        dg.check_safe(t)?;
    }
    let tr = ClassTransfer::new(dg, x)?;
    let ctx = dg.category.ctx();
    let dims: BTreeMap<i64, usize> = degrees.iter().map(|&t| (t, tr.source[&t].dim)).collect();
    let identity = tr.class_of_target(0, tr.psi.augmentation.clone())?;
    let reps = |t: i64| -> Vec<Vec<F>> { (0..tr.source[&t].dim).map(|k| tr.source[&t].representative(k)).collect() };
    let perturbed = |t: i64, rng: &mut R| -> Vec<Vec<F>> {
        let d = tr.psi.source.complex.d(t - 1);
        reps(t)
            .into_iter()
            .map(|v| {
                let h: Vec<F> = (0..d.cols()).map(|_| F::random(ctx, rng)).collect();
                v.iter().zip(d.mul_vec(&h)).map(|(a, b)| a.clone() + b).collect()
            })
            .collect()
    };
    let mut products = BTreeMap::new();
    let mut unavailable = Vec::new();
    let mut representative_independent = true;
    for &s in degrees {
        for &t in degrees {
            if !dg.safe.contains(s + t) {
                unavailable.push((s, t));
                continue;
            }
            let compute = |gs: &[Vec<F>], fs: &[Vec<F>]| -> Result<Vec<Vec<Vec<F>>>, DgError> {
                gs.iter()
                    .map(|g| fs.iter().map(|f| tr.product(s, g, t, f)).collect())
                    .collect()
            };
            let table = compute(&reps(s), &reps(t))?;
            let again = compute(&perturbed(s, rng), &perturbed(t, rng))?;
            representative_independent &= table == again;
            products.insert((s, t), table);
        }
    }
    Ok(EndRing {
        object: x,
        degrees: degrees.to_vec(),
        dims,
        identity,
        products,
        unavailable,
        representative_independent,
    })
}
