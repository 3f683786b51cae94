use carleson_lab::operators::{measure_sell_decay, SellConfig};
use carleson_lab::signal::Axis;

fn main() {
    let t0 = std::time::Instant::now();
    for (m, d) in [(2u32, 3u32), (3, 2)] {
        for axis in [Axis::Y, Axis::X] {
            let t1 = std::time::Instant::now();
            let cfg = SellConfig {
                m, d, axis,
                line_points: 256,
                free_points: 64,
                distinct_values: 2,
                seed: 7,
            };
            let ells: Vec<i32> = (1..=6).collect();
            let decay = measure_sell_decay(&cfg, &ells).unwrap();
            let fit = decay.fit.unwrap();
            let logs: Vec<String> = decay.norms.iter().map(|n| format!("{:.3}", n.log2())).collect();
            println!(
                "m={m} d={d} axis={axis:?}: slope {:.4} resid {:.4} ({:?}) log2norms {:?}",
                fit.slope, fit.residual_rms, t1.elapsed(), logs
            );
        }
    }
    println!("total {:?}", t0.elapsed());
}
