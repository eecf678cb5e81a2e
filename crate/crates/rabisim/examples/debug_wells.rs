use rabisim::entanglement::ThermalSpec;
use rabisim::rabi::RabiParams;
use rabisim::specfit::*;

fn main() {
    let presets: [(&str, f64, f64, f64); 2] = [
        ("I_m0p5", 0.505, 6.336, 4.57),
        ("II_m0p5", 0.441, 5.711, 7.63),
    ];
    let trans = [(0usize, 1usize), (0, 2), (1, 3), (2, 4), (0, 3), (1, 2)];
    for (name, d, w, g) in presets {
        let truth = RabiParams::new(d, w, g).unwrap();
        let t = ThermalSpec::new(45.0).unwrap();
        let eps: Vec<f64> = (0..41).map(|k| -8.0 + 0.4 * k as f64).collect();
        let probe: Vec<f64> = (0..491).map(|k| 0.2 + 0.02 * k as f64).collect();
        let ds = synthesize_dataset(&truth, &t, &eps, &probe, 0.06, 0.0, 7).unwrap();
        let dips = extract_dips(&ds, 6, 0.04);
        let initial = RabiParams::new(d * 1.10, w * 0.93, g * 1.08).unwrap();
        match fit_parameters(&dips, &initial, &trans) {
            Ok(fit) => println!(
                "{name}: dips={} delta={:.4}({:+.2}%) omega={:.4}({:+.2}%) g={:.4}({:+.2}%) rms={:.5}",
                dips.total_dips(),
                fit.params.delta, 100.0 * (fit.params.delta - d) / d,
                fit.params.omega_o, 100.0 * (fit.params.omega_o - w) / w,
                fit.params.g, 100.0 * (fit.params.g - g) / g,
                fit.residual_rms
            ),
            Err(e) => println!("{name}: fit error: {e}"),
        }
    }
}
