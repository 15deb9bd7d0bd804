use std::sync::Arc;

use proptest::prelude::*;
use qshape_core::complexes::{cohomology, hom_complex, make_complex, random_invertible, Window};
use qshape_core::dg::{build_dgp, psi};
use qshape_core::field::{Field, Fp, Prime};
use qshape_core::linalg::Matrix;
use qshape_core::modules::*;
use qshape_core::presentations::{present, split_semisimple, tensor_with_algebra, FDCategory, QuiverPresentation};
use qshape_core::resolutions::{complete_resolution, tensor_resolution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P: Prime = Prime::DEFAULT;

fn shape(i: usize) -> QuiverPresentation {
    match i % 5 {
        0 => QuiverPresentation::cyclic(2, 2),
        1 => QuiverPresentation::cyclic(3, 2),
        2 => QuiverPresentation::cyclic(2, 3),
        3 => QuiverPresentation::truncated_polynomial(2),
        _ => QuiverPresentation::truncated_polynomial(3),
    }
}

fn cat(i: usize) -> Arc<FDCategory<Fp>> {
    Arc::new(present::<Fp>(P, &shape(i)).unwrap())
}

fn random_elem<R: Rng>(n: usize, rng: &mut R) -> Vec<Fp> {
    (0..n).map(|_| Fp::random(P, rng)).collect()
}

/// Cokernel of a random map between sums of representables.
fn random_module<R: Rng>(c: &Arc<FDCategory<Fp>>, rng: &mut R) -> Arc<Rep<Fp>> {
    let n = c.len();
    let top: Vec<usize> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..n)).collect();
    let rel: Vec<usize> = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..n)).collect();
    let p0 = sum_of_representables(c, &top);
    let p1 = sum_of_representables(c, &rel);
    let elems: Vec<Vec<Fp>> = rel.iter().map(|&q| random_elem(p0.dim(q), rng)).collect();
    cokernel(&yoneda_map(&p1, &rel, &p0, &elems)).0
}

/// `M` transported along random invertible matrices at each object.
fn twist<R: Rng>(m: &Arc<Rep<Fp>>, rng: &mut R) -> (Arc<Rep<Fp>>, Vec<Matrix<Fp>>) {
    let c = m.cat().clone();
    let n = c.len();
    let g: Vec<Matrix<Fp>> = (0..n).map(|q| random_invertible::<Fp, _>(P, rng, m.dim(q))).collect();
    let gi: Vec<Matrix<Fp>> = g.iter().map(|x| x.inverse().unwrap()).collect();
    let mut act = Vec::new();
    for s in 0..n {
        for t in 0..n {
            act.push((0..c.dim(s, t)).map(|i| g[s].mul(m.action(s, t, i)).mul(&gi[t])).collect());
        }
    }
    (Arc::new(Rep::new(c, m.dims().to_vec(), act).unwrap()), g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn category_laws_and_tensor_dims(i in 0usize..5, a in 0usize..3) {
        let q = cat(i);
        prop_assert!(q.check_laws().is_ok());
        let alg = match a {
            0 => present::<Fp>(P, &QuiverPresentation::truncated_polynomial(2)).unwrap(),
            1 => present::<Fp>(P, &QuiverPresentation::truncated_polynomial(3)).unwrap(),
            _ => split_semisimple::<Fp>(P, 2),
        };
        let aq = tensor_with_algebra(&alg, &q).unwrap();
        prop_assert!(aq.check_laws().is_ok());
        for s in 0..q.len() {
            for t in 0..q.len() {
                prop_assert_eq!(aq.dim(s, t), alg.dim(0, 0) * q.dim(s, t));
            }
            // Q(q, q) is spanned by the identity and the radical
            prop_assert_eq!(q.radical(s, s).rank() + 1, q.dim(s, s));
        }
    }

    #[test]
    fn module_invariants(i in 0usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = cat(i);
        let m = random_module(&c, &mut rng);
        let n = random_module(&c, &mut rng);
        for q in 0..c.len() {
            let p = Arc::new(representable(&c, q));
            prop_assert_eq!(hom_space(&p, &m).unwrap().len(), m.dim(q));
        }
        let st = stable_hom(&m, &n).unwrap().dim;
        prop_assert!(st <= hom_space(&m, &n).unwrap().len());
        prop_assert_eq!(st, stable_hom_dim_via_envelope(&m, &n).unwrap());
        let (n2, _) = twist(&n, &mut rng);
        prop_assert_eq!(stable_hom(&m, &n2).unwrap().dim, st);
        prop_assert!(is_isomorphic(&n, &n2, &mut rng, DEFAULT_ISO_TRIALS).unwrap().is_some());
        // the cover is minimal: tops agree
        let cover = projective_cover(&m);
        prop_assert_eq!(top(&cover.projective).0.dims().to_vec(), top(&m).0.dims().to_vec());
    }

    #[test]
    fn syzygy_and_cosyzygy_are_inverse(i in 0usize..5, q in 0usize..3, k in 0usize..3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = cat(i);
        let mut m = Arc::new(stalk(&c, q % c.len()).unwrap());
        for _ in 0..k {
            m = syzygy(&m).0;
        }
        let back = cosyzygy(&syzygy(&m).0).unwrap().0;
        let iso = is_isomorphic(&back, &m, &mut rng, DEFAULT_ISO_TRIALS).unwrap();
        prop_assert!(iso.is_some_and(|i| i.verify()));
        let forth = syzygy(&cosyzygy(&m).unwrap().0).0;
        prop_assert!(is_isomorphic(&forth, &m, &mut rng, DEFAULT_ISO_TRIALS).unwrap().is_some());
    }

    #[test]
    fn resolutions_are_exact_minimal_periodic(i in 0usize..5, r in 2i64..6) {
        let c = cat(i);
        let n = c.len();
        for q in 0..n {
            let s = Arc::new(stalk(&c, q).unwrap());
            let res = complete_resolution(&s, Window { lo: -r, hi: r }).unwrap();
            prop_assert!(res.is_exact());
            prop_assert!(res.is_minimal());
            prop_assert!(res.squares_to_zero());
            for j in -r..r {
                let l = res.labels(j).unwrap();
                prop_assert_eq!(l.len(), 1);
                let step = res.labels(j + 1).unwrap()[0];
                if i % 5 == 3 || i % 5 == 4 {
                    prop_assert_eq!(step, l[0]);
                } else if i % 5 != 2 && j + n as i64 <= r {
                    prop_assert_eq!(res.labels(j + n as i64).unwrap(), l);
                }
            }
        }
    }

    #[test]
    fn tensor_commutes_with_omega(i in 0usize..5, t in -1i64..=2, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = cat(i);
        let a = present::<Fp>(P, &QuiverPresentation::truncated_polynomial(2)).unwrap();
        let aq = Arc::new(tensor_with_algebra(&a, &c).unwrap());
        let s = Arc::new(stalk(&c, 0).unwrap());
        let r = complete_resolution(&s, Window { lo: -3, hi: 3 }).unwrap();
        let ar = tensor_resolution(&a, &aq, &r).unwrap();
        prop_assert!(ar.is_exact());
        let lhs = Arc::new(tensor_algebra_module(&a, &aq, r.omega(t).unwrap().0).unwrap());
        let rhs = ar.omega(t).unwrap().0;
        prop_assert!(is_isomorphic(&lhs, rhs, &mut rng, DEFAULT_ISO_TRIALS).unwrap().is_some());
    }

    #[test]
    fn contractible_complexes_have_no_homotopy_classes(
        pairs in proptest::collection::vec((0i64..3, 1usize..3), 1..4),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = Window { lo: 0, hi: 3 };
        // direct sum of identity maps k^m -> k^m from degree j to j+1, in a random basis
        let mut src = [0usize; 4];
        let mut tgt = [0usize; 4];
        for &(j, m) in &pairs {
            src[j as usize] += m;
            tgt[j as usize + 1] += m;
        }
        let dims: Vec<usize> = (0..4).map(|k| src[k] + tgt[k]).collect();
        let g: Vec<Matrix<Fp>> = dims.iter().map(|&d| random_invertible::<Fp, _>(P, &mut rng, d)).collect();
        let diffs: Vec<Matrix<Fp>> = (0..3)
            .map(|k| {
                let mut d = Matrix::<Fp>::zeros(P, dims[k + 1], dims[k]);
                for x in 0..src[k] {
                    d[(src[k + 1] + x, x)] = Fp::one(P);
                }
                g[k + 1].mul(&d).mul(&g[k].inverse().unwrap())
            })
            .collect();
        let c = Arc::new(make_complex(P, w, dims, diffs).unwrap());
        let h = hom_complex(&c, &c).unwrap();
        prop_assert_eq!(cohomology(&h.complex, 0).unwrap().dim, 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn psi_matches_the_oracle(i in 0usize..5, r in 4i64..8) {
        let c = cat(i);
        let rs = (0..c.len())
            .map(|q| complete_resolution(&Arc::new(stalk(&c, q).unwrap()), Window { lo: -r, hi: r }).unwrap())
            .collect();
        let dg = build_dgp(rs).unwrap();
        for x in 0..dg.len() {
            for y in 0..dg.len() {
                let ps = psi(&dg, x, y).unwrap();
                prop_assert!(ps.map.commutes_with_differentials());
                for t in dg.safe.degrees() {
                    let om = dg.objects[x].omega(t).unwrap().0.clone();
                    let oracle = stable_hom(&om, dg.objects[y].base()).unwrap().dim;
                    prop_assert_eq!(dg.cohomology_dim(x, y, t).unwrap(), oracle);
                    prop_assert!(ps.on_cohomology(t).unwrap().is_invertible());
                }
            }
        }
    }
}
