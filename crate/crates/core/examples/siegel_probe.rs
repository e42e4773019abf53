use ordcover::census::{enumerate_log_curve_points_at, DiskSpec};
use ordcover::curves;
use ordcover::smallpoly::siegel_construct;
use ordcover::trajectory::ord_gamma;
use ordcover::{Real, BF};

fn main() {
    let traj = curves::logcurve_at::<BF>(5, 4, true, None).unwrap();
    let z0 = traj.base_point()[0].clone();
    let ws = enumerate_log_curve_points_at::<BF>(3, &DiskSpec::default_log_domain(), true, traj.rho(), &z0).unwrap();
    println!("census: {} total", ws.len());
    for w in &ws {
        println!("  pair {:?} z={:.6} s={:.4}+{:.4}i in_gamma={}", w.pair, w.z_curve.re.to_f64(), w.s_param.re.to_f64(), w.s_param.im.to_f64(), w.in_gamma);
    }
    let in_g: Vec<_> = ws.iter().filter(|w| w.in_gamma).map(|w| w.point.clone()).collect();
    println!("in_gamma: {}", in_g.len());
    for (deg_bound, height_bound) in [(2u32, 2.0f64), (2, 3.0), (3, 3.0)] {
        match siegel_construct(&in_g, deg_bound, height_bound) {
            Ok(out) => {
                println!("deg<={deg_bound} h<={height_bound}: {} candidates, first = {:?} (h_ln {:.3})", out.candidates.len(), out.poly, out.achieved_height_ln);
                for cand in out.candidates.iter().take(6) {
                    match ord_gamma(&traj, cand, 512) {
                        Ok(r) => println!("   cand {:?} ord={:.4}", cand, r.ord.to_f64()),
                        Err(e) => println!("   cand {:?} ord ERR {e}", cand),
                    }
                }
            }
            Err(e) => println!("deg<={deg_bound} h<={height_bound}: ERR {e}"),
        }
    }
}
