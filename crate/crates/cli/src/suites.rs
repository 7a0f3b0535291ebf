//! Check suites selectable with `toprec check --suite`.

use toprec::algebra::Scalar;
use toprec::identities::*;
use toprec::recursion::Engine;
use toprec::Result;

use crate::Suite;

const ORDER: [Suite; 11] = [
    Suite::SheetSum,
    Suite::Symmetry,
    Suite::Dilaton,
    Suite::Commutation,
    Suite::Loop,
    Suite::ThetaFree,
    Suite::Hequiv,
    Suite::DoubleBp,
    Suite::Rauch,
    Suite::Robustness,
    Suite::Lemma,
];

pub fn run(engine: &Engine, suite: Suite, hmax: usize, tuples: usize, seed: u64) -> Result<Vec<CheckReport>> {
    if suite == Suite::All {
        let mut out = Vec::new();
        for s in ORDER {
            out.extend(run(engine, s, hmax, tuples, seed)?);
        }
        return Ok(out);
    }
    let curve = engine.curve();
    let mut out = Vec::new();
    match suite {
        Suite::All => unreachable!(),
        Suite::SheetSum => {
            for h in 1..=hmax {
                out.push(check_sheet_sum(engine, h)?);
            }
            out.push(check_sheet_sum_barred(engine, 0, 2, seed)?);
        }
        Suite::Symmetry => {
            for (h, k) in graded_keys(2 * hmax + 1) {
                if k >= 2 && h <= hmax {
                    out.push(check_symmetry(engine, h, k, seed, tuples)?);
                }
            }
        }
        Suite::Dilaton => {
            out.push(check_h_bergman(curve)?);
            out.push(check_h_w30(engine)?);
            for h in 0..=hmax {
                for k in 1..=2 {
                    if 2 * h + k >= 2 && 2 * h + k < 2 * hmax + 2 {
                        out.push(check_dilaton(engine, h, k, seed)?);
                    }
                }
            }
        }
        Suite::Commutation => {
            for h in 1..=hmax {
                out.push(check_commutation(engine, h, 1, seed)?);
            }
        }
        Suite::Loop => {
            for h in 1..=hmax {
                out.extend(check_loop(engine, h)?);
            }
        }
        Suite::ThetaFree => out.extend(check_theta_free(engine, 2 * hmax + 3, seed, tuples)?),
        Suite::Hequiv => {
            for h in 1..=hmax {
                out.push(check_hequiv(engine, h)?);
            }
            if hmax >= 2 {
                out.push(check_scaling(curve.spec(), 2, &Scalar::int(2), engine.config())?);
            }
        }
        Suite::DoubleBp => out.extend(check_double_bp(curve)?),
        Suite::Rauch => out.push(check_rauch(engine, seed, tuples)?),
        Suite::Robustness => {
            let keys: Vec<(usize, usize)> = graded_keys(2 * hmax + 2).into_iter().filter(|&(h, _)| h <= hmax).collect();
            let other = sample_points(curve, seed.wrapping_add(1000), 1).remove(0);
            out.extend(check_basepoint(curve.spec(), &other, &keys, seed)?);
            out.extend(check_truncation(curve, &keys, seed)?);
        }
        Suite::Lemma => {
            let q0 = sample_points(curve, seed, 1).remove(0);
            for bp in 0..curve.branch_points().len() {
                out.push(check_residue_commutation(curve, bp, &q0)?);
            }
        }
    }
    Ok(out)
}
