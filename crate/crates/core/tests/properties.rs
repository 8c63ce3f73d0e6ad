use foldnet::analysis::gain::gain_coefficient_pairwise;
use foldnet::fold::reflect_set;
use foldnet::{
    box_fold, check_net, estimate, faure_net, fold_sequence, from_digits, gain_coefficient, interval_index, reflect,
    star_discrepancy, to_digits, DigitPoint, ElementaryInterval, Integrand, NetSpec, PointSet, ReflectionVector,
    Scramble, ScrambleKind,
};
use proptest::prelude::*;

const BASES: [u32; 3] = [2, 3, 5];

fn base_strategy() -> impl Strategy<Value = u32> {
    prop::sample::select(BASES.to_vec())
}

fn kind_strategy() -> impl Strategy<Value = ScrambleKind> {
    prop::sample::select(ScrambleKind::ALL.to_vec())
}

/// A random point set of `n` points with `precision` digits per coordinate.
fn digit_set(base: u32, dim: usize, precision: usize, n: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(0..base as u8, n * dim * precision)
        .prop_map(move |digits| PointSet::from_flat(base, dim, precision, digits).unwrap())
}

fn based_set(dim: usize, precision: usize, max_n: usize) -> impl Strategy<Value = PointSet> {
    (base_strategy(), 1..=max_n).prop_flat_map(move |(b, n)| digit_set(b, dim, precision, n))
}

fn sorted_rows(set: &PointSet) -> Vec<Vec<u8>> {
    let mut rows: Vec<Vec<u8>> = (0..set.len()).map(|i| set.point_digits(i).to_vec()).collect();
    rows.sort();
    rows
}

fn brute_discrepancy(pts: &[Vec<f64>]) -> f64 {
    let n = pts.len() as f64;
    let mut xs: Vec<f64> = pts.iter().map(|p| p[0]).chain([1.0]).collect();
    let mut ys: Vec<f64> = pts.iter().map(|p| p[1]).chain([1.0]).collect();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let mut worst: f64 = 0.0;
    for &x in &xs {
        for &y in &ys {
            let open = pts.iter().filter(|p| p[0] < x && p[1] < y).count() as f64;
            let closed = pts.iter().filter(|p| p[0] <= x && p[1] <= y).count() as f64;
            worst = worst.max((open / n - x * y).abs()).max((closed / n - x * y).abs());
        }
    }
    worst
}

#[test]
fn round_trip_ten_thousand_uniforms() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for base in BASES {
        let k = foldnet::default_precision(base);
        let tol = f64::from(base).powi(-(k as i32));
        for _ in 0..10_000 {
            let x: f64 = rng.random();
            let y = from_digits(&to_digits(x, base, k).unwrap());
            assert!((x - y).abs() <= tol, "b={base} x={x} y={y}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn round_trip_within_one_ulp_of_base(base in base_strategy(), k in 4usize..=30, x in 0.0f64..1.0) {
        let y = from_digits(&to_digits(x, base, k).unwrap());
        prop_assert!((x - y).abs() <= f64::from(base).powi(-(k as i32)));
    }

    #[test]
    fn digits_round_trip_exactly(set in based_set(1, 12, 1)) {
        let e = set.point(0).expansion(0);
        prop_assert_eq!(to_digits(from_digits(&e), set.base(), 12).unwrap(), e);
    }

    #[test]
    fn intervals_tile(set in based_set(3, 6, 1), kappa in prop::collection::vec(0usize..=6, 3)) {
        let x = set.point(0);
        let tau = interval_index(&x, &kappa).unwrap();
        let cell = ElementaryInterval::new(set.base(), kappa.clone(), tau.clone()).unwrap();
        prop_assert!(cell.contains(&x).unwrap());
        let b = u64::from(set.base());
        for j in 0..3 {
            let cells = b.pow(kappa[j] as u32);
            if cells > 1 {
                let mut other = tau.clone();
                other[j] = (other[j] + 1) % cells;
                let neighbour = ElementaryInterval::new(set.base(), kappa.clone(), other).unwrap();
                prop_assert!(!neighbour.contains(&x).unwrap());
            }
        }
        let vol = cell.volume();
        let order = kappa.iter().sum::<usize>() as i32;
        prop_assert_eq!(vol, f64::from(set.base()).powi(-order));
    }

    #[test]
    fn reflection_is_a_local_involution(set in based_set(2, 10, 1), orders in prop::collection::vec(-1i32..=10, 2)) {
        let x = set.point(0);
        let kappa = ReflectionVector::new(orders.clone()).unwrap();
        let r = reflect(&x, &kappa).unwrap();
        prop_assert_eq!(reflect(&r, &kappa).unwrap(), x.clone());
        for (j, &k) in orders.iter().enumerate() {
            let keep = k.max(0) as usize;
            prop_assert_eq!(&r.coord(j)[..keep], &x.coord(j)[..keep]);
            if k < 0 {
                prop_assert_eq!(r.coord(j), x.coord(j));
            }
        }
    }

    #[test]
    fn reflection_centres_on_the_interval(set in based_set(1, 20, 8), k in 0i32..=6) {
        let kappa = ReflectionVector::new(vec![k]).unwrap();
        let r = reflect_set(&set, &kappa).unwrap();
        let scale = f64::from(set.base()).powi(k);
        for i in 0..set.len() {
            let x = set.values(i)[0];
            let y = r.values(i)[0];
            let centre = ((x * scale).floor() + 0.5) / scale;
            // Flipping a finite digit string lands b^-K short of the exact mirror.
            prop_assert!((x + y - 2.0 * centre).abs() <= 2.0 * f64::from(set.base()).powi(-20) + 1e-15);
        }
    }

    #[test]
    fn box_fold_matches_averaged_integrand(set in based_set(2, 12, 6), r1 in 0usize..=4, r2 in 0usize..=4) {
        let f = Integrand::sloan_joe_g();
        let folded = box_fold(&set, &[r1, r2]).unwrap();
        prop_assert_eq!(folded.len(), 4 * set.len());
        let mut avg = 0.0;
        for orders in [[-1, -1], [r1 as i32, -1], [-1, r2 as i32], [r1 as i32, r2 as i32]] {
            let v = reflect_set(&set, &ReflectionVector::new(orders.to_vec()).unwrap()).unwrap();
            avg += estimate(&f, &v).unwrap() / 4.0;
        }
        prop_assert!((estimate(&f, &folded).unwrap() - avg).abs() < 1e-12);
    }

    #[test]
    fn folds_commute_as_multisets(set in based_set(2, 8, 5), a in prop::collection::vec(-1i32..=5, 2), c in prop::collection::vec(-1i32..=5, 2)) {
        let ka = ReflectionVector::new(a).unwrap();
        let kc = ReflectionVector::new(c).unwrap();
        let ac = fold_sequence(&fold_sequence(&set, &ka).unwrap(), &kc).unwrap();
        let ca = fold_sequence(&fold_sequence(&set, &kc).unwrap(), &ka).unwrap();
        prop_assert_eq!(sorted_rows(&ac), sorted_rows(&ca));
    }

    #[test]
    fn scrambles_are_injective_and_deterministic(kind in kind_strategy(), seed in any::<u64>(), set in based_set(2, 6, 40)) {
        let s = Scramble::new(kind, set.base(), 6, 2, seed).unwrap();
        let out = s.apply_set(&set).unwrap();
        prop_assert_eq!(&out, &Scramble::new(kind, set.base(), 6, 2, seed).unwrap().apply_set(&set).unwrap());
        let mut before = sorted_rows(&set);
        before.dedup();
        let mut after = sorted_rows(&out);
        after.dedup();
        prop_assert_eq!(before.len(), after.len());
    }

    #[test]
    fn scrambles_preserve_nets(kind in kind_strategy(), seed in any::<u64>(), base in prop::sample::select(vec![2u32, 3]), m in 1usize..=4) {
        let spec = NetSpec::net(base, 2, m).unwrap();
        let net = faure_net(&spec, 12).unwrap().points;
        let s = Scramble::new(kind, base, 12, 2, seed).unwrap().apply_set(&net).unwrap();
        prop_assert!(check_net(&s, &spec).unwrap().passed);
    }

    #[test]
    fn gains_are_nonnegative_and_agree_with_pairwise_sum(
        set in based_set(2, 6, 30),
        u in prop::sample::select(vec![vec![0usize], vec![1], vec![0, 1]]),
        k in prop::collection::vec(0usize..=4, 2),
    ) {
        let kappa = &k[..u.len()];
        let g = gain_coefficient(&set, &u, kappa).unwrap();
        let pairwise = gain_coefficient_pairwise(&set, &u, kappa).unwrap();
        prop_assert!(g >= 0.0);
        prop_assert!((g - pairwise).abs() <= 1e-9 * pairwise.abs().max(1.0));
    }

    #[test]
    fn discrepancy_matches_brute_force_and_ignores_coordinate_order(set in based_set(2, 10, 12)) {
        let pts = set.to_values();
        let d = star_discrepancy(&set).unwrap();
        prop_assert!((d - brute_discrepancy(&pts)).abs() < 1e-12);
        let swapped: Vec<Vec<f64>> = pts.iter().map(|p| vec![p[1], p[0]]).collect();
        let t = PointSet::from_values(&swapped, set.base(), 10).unwrap();
        prop_assert!((star_discrepancy(&t).unwrap() - d).abs() < 1e-15);
    }

    #[test]
    fn faure_prefixes_nest(base in base_strategy(), m in 0usize..=4) {
        let dim = 2;
        let small = faure_net(&NetSpec::net(base, dim, m).unwrap(), 16).unwrap().points;
        let big = faure_net(&NetSpec::net(base, dim, m + 1).unwrap(), 16).unwrap().points;
        prop_assert_eq!(big.slice(0, small.len()), small);
    }
}

#[test]
fn digit_point_from_values_is_exact_for_dyadics() {
    let p = DigitPoint::from_values(&[0.5, 0.375], 2, 8).unwrap();
    assert_eq!(p.coord(0), &[1, 0, 0, 0, 0, 0, 0, 0]);
    assert_eq!(p.coord(1), &[0, 1, 1, 0, 0, 0, 0, 0]);
}
