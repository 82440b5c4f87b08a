use std::sync::Arc;

use epslab::characters::{enumerate_chars, AddChar, MultChar};
use epslab::cyclo::{Cyclo, RootOfUnity};
use epslab::padic::{val_unit_decompose, Prime, ValUnit};
use epslab::sums::{gauss_sum, gauss_sum_over, jacobi_shell, JacobiMode};
use epslab::twist::{classify_case, verify_pair, CaseTag, Verdict};
use num_complex::Complex64;
use num_rational::Ratio;
use proptest::prelude::*;

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

fn cyclo_strategy() -> impl Strategy<Value = Cyclo> {
    (1u64..=60).prop_flat_map(|m| {
        prop::collection::vec(-4i64..=4, m as usize).prop_map(move |v| Cyclo::from_group_ring(m, &v))
    })
}

fn chars(p: u64, n: i64) -> Arc<Vec<MultChar>> {
    Arc::new(enumerate_chars(prime(p), n, None).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conj_and_abs_square(a in cyclo_strategy(), b in cyclo_strategy()) {
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!(a.abs_square(), a.conj().abs_square());
        prop_assert_eq!(a.mul(&b).abs_square(), a.abs_square().mul(&b.abs_square()));
    }

    #[test]
    fn embedding_is_a_ring_homomorphism(
        (m, terms, factors) in (1u64..=60).prop_flat_map(|m| {
            let t = prop::collection::vec(prop::collection::vec(-2i64..=2, m as usize), 2..100);
            let f = prop::collection::vec((0..m as i64, prop::sample::select(vec![-2i64, -1, 1, 2])), 1..100);
            (Just(m), t, f)
        })
    ) {
        let terms: Vec<Cyclo> = terms.iter().map(|v| Cyclo::from_group_ring(m, v)).collect();
        let mut sum = Cyclo::zero();
        let mut fsum = Complex64::new(0.0, 0.0);
        for t in &terms {
            sum = &sum + t;
            fsum += t.embed();
        }
        prop_assert!((sum.embed() - fsum).norm() < 1e-10 * (1.0 + fsum.norm()));
        for w in terms.windows(2) {
            let (x, y) = (w[0].embed(), w[1].embed());
            prop_assert!((w[0].mul(&w[1]).embed() - x * y).norm() < 1e-10 * (1.0 + x.norm() * y.norm()));
        }
        // long products of signed, scaled roots of unity
        let mut exact = Cyclo::one();
        let mut float = Complex64::new(1.0, 0.0);
        for &(k, c) in &factors {
            let t = Cyclo::root(m, k).scale_int(c);
            float *= t.embed();
            exact = exact.mul(&t);
        }
        prop_assert!((exact.embed() - float).norm() <= 1e-10 * float.norm());
    }

    #[test]
    fn decompose_is_multiplicative(
        p in prop::sample::select(vec![2u64, 3, 5, 7]),
        xn in -5000i64..5000, xd in 1i64..5000, yn in -5000i64..5000, yd in 1i64..5000,
    ) {
        prop_assume!(xn != 0 && yn != 0);
        let p = prime(p);
        let k = 6;
        let x = Ratio::new(xn, xd);
        let y = Ratio::new(yn, yd);
        let dx = val_unit_decompose(x, p, k).unwrap();
        let dy = val_unit_decompose(y, p, k).unwrap();
        let dxy = val_unit_decompose(x * y, p, k).unwrap();
        prop_assert_eq!(dxy.v, dx.v + dy.v);
        prop_assert_eq!(dxy.u, dx.u * dy.u % p.pow(k));
    }

    #[test]
    fn gauss_sum_is_independent_of_representatives(
        pa in prop::sample::select(vec![(2u64, 2u32), (2, 3), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2)]),
        idx in any::<prop::sample::Index>(),
        seeds in prop::collection::vec(any::<u64>(), 1..4),
    ) {
        let (p, n) = pa;
        let all = chars(p, n as i64);
        let chi = idx.get(&all[..]).clone();
        prop_assume!(chi.is_ramified());
        let a = chi.conductor();
        let pr = prime(p);
        let psi = AddChar::new(ValUnit::exact(pr, (seeds[0] % 3) as i64 - 1, 1).unwrap());
        let pa_pow = pr.pow(a);
        let reps: Vec<ValUnit> = (1..pa_pow)
            .filter(|x| x % p != 0)
            .enumerate()
            .map(|(i, x)| {
                // x * (1 + p^a w) with w varying per representative
                let w = seeds[i % seeds.len()].wrapping_add(i as u64) % 1000;
                let lifted = x as i128 * (1 + pa_pow as i128 * w as i128);
                let u = (lifted % (pr.pow(pr.max_precision()) as i128)) as i64;
                ValUnit::exact(pr, 0, u).unwrap()
            })
            .collect();
        let direct = gauss_sum(&chi, &psi, a as i64).unwrap();
        prop_assert_eq!(gauss_sum_over(&chi, &psi, &reps).unwrap(), direct);
    }

    #[test]
    fn verdicts_do_not_depend_on_pi_values(
        p in prop::sample::select(vec![3u64, 5]),
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
        k1 in 0i64..6, k2 in 0i64..6,
    ) {
        let all = chars(p, 2);
        let ram: Vec<&MultChar> = all.iter().filter(|c| c.is_ramified()).collect();
        let a = i.get(&ram[..]).at_level(i.get(&ram[..]).conductor()).unwrap();
        let b = j.get(&ram[..]).at_level(j.get(&ram[..]).conductor()).unwrap();
        let psi = AddChar::canonical(prime(p));
        let modes = [JacobiMode::Strict, JacobiMode::AutoShell];
        let base = verify_pair(&a, &b, &psi, &modes).unwrap();
        let twisted = verify_pair(
            &a.with_pi(RootOfUnity::new(6, k1)),
            &b.with_pi(RootOfUnity::new(6, k2)),
            &psi,
            &modes,
        ).unwrap();
        for m in modes {
            prop_assert_eq!(base.by_mode[&m].verdict.kind(), twisted.by_mode[&m].verdict.kind());
        }
        if classify_case(&a, &b).unwrap() == CaseTag::Case1 {
            prop_assert_eq!(&twisted.by_mode[&JacobiMode::Strict].verdict, &Verdict::ExactMatch);
        }
    }

    #[test]
    fn shell_sums_partition_the_raised_level_sum(
        p in prop::sample::select(vec![2u64, 3, 5]),
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
        k in 0i64..6,
    ) {
        let pr = prime(p);
        let all = chars(p, 2);
        let chi1 = i.get(&all[..]).clone();
        let chi2 = j.get(&all[..]).with_pi(RootOfUnity::new(6, k));
        let a2 = chi2.conductor().max(1);
        let top = 2u32;
        // shells v = 0..=top evaluated at the raised level where all of them are defined
        let level = top + a2 + 1;
        let chi1 = chi1.at_level(level).unwrap();
        let chi2 = chi2.at_level(level).unwrap();
        let mut total = Cyclo::zero();
        for v in 0..=top {
            let s = jacobi_shell(&chi1, &chi2, level as i64, v).unwrap();
            // one level higher, the same shell picks up a factor q
            let up = jacobi_shell(&chi1.at_level(level + 1).unwrap(), &chi2.at_level(level + 1).unwrap(), level as i64 + 1, v).unwrap();
            prop_assert_eq!(up, s.scale_int(p as i64));
            total = &total + &s;
        }
        // independent oracle: field-level evaluation of every term with v(1 - s) <= top
        let modulus = pr.pow(level);
        let mut direct = Cyclo::zero();
        for s in (1..modulus).filter(|s| s % p != 0) {
            let d = ValUnit::exact(pr, 0, 1).unwrap().sub(&ValUnit::exact(pr, 0, s as i64).unwrap());
            let Ok(d) = d else { continue };
            if d.v > top as i64 {
                continue;
            }
            let x = chi1.eval(&ValUnit::exact(pr, 0, s as i64).unwrap()).unwrap().inv();
            let y = chi2.eval(&d.truncate(level - d.v as u32)).unwrap().inv();
            direct = &direct + &x.mul(&y).to_cyclo();
        }
        prop_assert_eq!(total, direct);
    }
}
