use ordcover::census::{enumerate_log_curve_points_at, DiskSpec};
use ordcover::curves;
use ordcover::smallpoly::siegel_construct;
use ordcover::trajectory::ord_gamma_with;
use ordcover::{Real, BF};
use std::time::Instant;

fn main() {
    let traj = curves::logcurve_at::<BF>(5, 4, true, None).unwrap();
    let z0 = traj.base_point()[0].clone();
    let ws = enumerate_log_curve_points_at::<BF>(
        5,
        &DiskSpec::default_log_domain(),
        true,
        traj.rho(),
        &z0,
    )
    .unwrap();
    for pair in [(5u32, 1u32), (5, 2)] {
        let pts: Vec<_> = ws
            .iter()
            .filter(|w| w.in_gamma && w.pair == pair)
            .map(|w| w.point.clone())
            .collect();
        println!("== pair {pair:?}: {} in-gamma pts", pts.len());
        if pts.is_empty() {
            continue;
        }
        for n_index in [6u64, 7, 8] {
            let d = (n_index / 2).max(1).min(4) as u32;
            let h = n_index as f64 / 2.0;
            let t0 = Instant::now();
            match siegel_construct(&pts, d, h) {
                Ok(out) => {
                    let t_sieg = t0.elapsed();
                    let t1 = Instant::now();
                    let mut best: Option<(String, f64)> = None;
                    let mut evals = 0;
                    for cand in out.candidates.iter() {
                        if evals >= 24 {
                            break;
                        }
                        let z = ordcover::cx::cx_from_f64::<BF>(0.3, 0.1);
                        let pt = traj.eval_gamma(&z).unwrap();
                        let v = cand.eval(&pt);
                        if ordcover::cx::cx_abs(&v).to_f64() < 1e-24 {
                            continue;
                        }
                        evals += 1;
                        if let Ok(r) = ord_gamma_with(&traj, cand, 512, false) {
                            let o = r.ord.to_f64();
                            if best.as_ref().map(|(_, b)| o > *b).unwrap_or(true) {
                                best = Some((format!("{:?}", cand), o));
                            }
                        }
                    }
                    println!(
                        "  N={n_index} deg={d}: siegel {} cands in {:?}; ord-scan ({evals} evals) {:?}; best {:?}",
                        out.candidates.len(),
                        t_sieg,
                        t1.elapsed(),
                        best
                    );
                }
                Err(e) => println!("  N={n_index} deg={d}: siegel ERR {e} in {:?}", t0.elapsed()),
            }
        }
    }
}
