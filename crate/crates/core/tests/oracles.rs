//! Values frozen from the scripts in `tests/oracles/`.

mod common;

use common::{brute_discrepancy, l3_spec};
use rcl_core::equidist::{discrepancy_exact, weyl_sum};
use rcl_core::lineseq::{torus_sequence, LineParams, TorusSequence};

// weyl_oracle.py, 200-bit summation
const WEYL_H1: [(u64, f64); 3] = [
    (1_000, 0.0062181875843348609253),
    (10_000, 0.0051636658772326721962),
    (100_000, 0.0023035132602333428909),
];
const WEYL_H3: [(u64, f64); 3] = [
    (1_000, 0.0044687510046981849197),
    (10_000, 0.0076552267253148227057),
    (100_000, 0.0047679641081771325343),
];
const WEYL_H1_M100000_RE: f64 = -138.56694536971584507;
const WEYL_H1_M100000_IM: f64 = 184.0134099776824129;
const Z1: f64 = 0.2175713172881684690464136;

// discrepancy_oracle.py, 100-bit brute force
const DISC: [(&str, &str, u64, f64, f64); 3] = [
    ("0", "0", 10, 0.33928293220421172616, 0.38114107661069550474),
    ("0", "0", 100, 0.10192865646107721209, 0.11985535135578405808),
    ("1/2", "5/4", 60, 0.12227488944174313606, 0.13127981627292885946),
];

fn l3_line(m: u64) -> TorusSequence {
    torus_sequence(&l3_spec(), &LineParams::parse("0", "0", m).unwrap())
}

#[test]
fn first_torus_point() {
    let z = l3_line(1);
    assert!((z.points[0][0] - Z1).abs() < 1e-15);
}

#[test]
fn weyl_sums_match_high_precision() {
    let z = l3_line(100_000);
    for (h, table) in [(1i64, WEYL_H1), (3, WEYL_H3)] {
        for (m, expected) in table {
            let w = weyl_sum(&z.prefix(m as usize), &[h]);
            assert!(
                (w.magnitude_over_m - expected).abs() < 1e-12,
                "h={h} m={m}: {} vs {expected}",
                w.magnitude_over_m
            );
        }
    }
    let w = weyl_sum(&z, &[1]);
    assert!((w.re - WEYL_H1_M100000_RE).abs() < 1e-7);
    assert!((w.im - WEYL_H1_M100000_IM).abs() < 1e-7);
}

#[test]
fn discrepancy_matches_high_precision_brute_force() {
    let spec = l3_spec();
    for (beta, gamma, m, d_star, d_ext) in DISC {
        let z = torus_sequence(&spec, &LineParams::parse(beta, gamma, m).unwrap());
        let d = discrepancy_exact(&z).unwrap();
        assert!((d.d_star - d_star).abs() < 1e-12, "{beta},{gamma},{m}: {} vs {d_star}", d.d_star);
        assert!((d.d_extreme - d_ext).abs() < 1e-12, "{beta},{gamma},{m}: {} vs {d_ext}", d.d_extreme);
    }
}

#[test]
fn brute_force_ties_and_edges() {
    let cases: Vec<Vec<Vec<f64>>> = vec![
        vec![vec![0.0]],
        vec![vec![0.0], vec![0.0], vec![0.5]],
        vec![vec![0.25], vec![0.25], vec![0.75], vec![0.75]],
        vec![vec![0.0, 0.0], vec![0.5, 0.5]],
        vec![vec![0.25, 0.75], vec![0.25, 0.25], vec![0.75, 0.25], vec![0.75, 0.75]],
        vec![vec![0.5, 0.0], vec![0.5, 0.5], vec![0.0, 0.5], vec![0.125, 0.875], vec![0.5, 0.875]],
    ];
    for pts in cases {
        let r = pts[0].len();
        let z = TorusSequence::new(r, pts.clone(), 52).unwrap();
        let d = discrepancy_exact(&z).unwrap();
        let (bs, be) = brute_discrepancy(&pts);
        assert!((d.d_star - bs).abs() < 1e-12, "{pts:?}: star {} vs {bs}", d.d_star);
        assert!((d.d_extreme - be).abs() < 1e-12, "{pts:?}: extreme {} vs {be}", d.d_extreme);
    }
}
