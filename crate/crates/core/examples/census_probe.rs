use ordcover::census::{enumerate_log_curve_points_at, DiskSpec};
use ordcover::curves;
use ordcover::smallpoly::{siegel_construct, Provenance};
use ordcover::trajectory::ord_gamma_with;
use ordcover::{Real, BF};

fn main() {
    let traj = curves::logcurve_at::<BF>(5, 4, true, None).unwrap();
    let z0 = traj.base_point()[0].clone();
    let ws = enumerate_log_curve_points_at::<BF>(5, &DiskSpec::default_log_domain(), true, traj.rho(), &z0).unwrap();
    for w in ws.iter().filter(|w| w.in_gamma) {
        println!("pair {:?} z={:.6}+{:.6}i |s|={:.4}", w.pair, w.z_curve.re.to_f64(), w.z_curve.im.to_f64(),
            ordcover::cx::cx_abs(&w.s_param).to_f64());
    }
    // try the 4th group's construction directly
    let pts: Vec<_> = ws.iter().filter(|w| w.in_gamma && w.pair == (5, 2)).map(|w| w.point.clone()).collect();
    println!("(5,2) in-gamma points: {}", pts.len());
    if !pts.is_empty() {
        for (d, h) in [(2u32, 2.5f64), (3, 3.0), (3, 4.0)] {
            match siegel_construct(&pts, d, h) {
                Ok(out) => {
                    println!("deg<={d} h<={h}: {} candidates", out.candidates.len());
                    for cand in out.candidates.iter().take(4) {
                        match ord_gamma_with(&traj, cand, 512, false) {
                            Ok(r) => println!("   {:?} ord={:.4}", cand, r.ord.to_f64()),
                            Err(e) => println!("   {:?} ERR {e}", cand),
                        }
                    }
                }
                Err(e) => println!("deg<={d} h<={h}: ERR {e}"),
            }
        }
        if let Provenance::ExactAlgebraic(ideal) = &pts[0].provenance {
            println!("minpoly: {:?}", ideal.min_poly);
        }
    }
}
