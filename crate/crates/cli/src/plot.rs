use crate::config::{Kind, ScenarioConfig, SweepObservable};
use crate::error::{CliError, Result};
use crate::table::ResultTable;

const W: f64 = 880.0;
const H: f64 = 560.0;
const ML: f64 = 72.0;
const MR: f64 = 30.0;
const MT: f64 = 42.0;
const MB: f64 = 56.0;

const LINE_COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Viridis anchor colors, evenly spaced over [0, 1].
const HEAT_STOPS: [(f64, f64, f64); 9] = [
    (0.267, 0.005, 0.329),
    (0.275, 0.194, 0.496),
    (0.213, 0.359, 0.552),
    (0.153, 0.497, 0.557),
    (0.122, 0.633, 0.530),
    (0.288, 0.758, 0.428),
    (0.626, 0.854, 0.223),
    (0.889, 0.893, 0.118),
    (0.993, 0.906, 0.144),
];

/// Picks a figure layout from the scenario kind and renders the table.
pub fn render(cfg: &ScenarioConfig, table: &ResultTable) -> Result<String> {
    match cfg.kind {
        Kind::SpectrumScan => line_plot(
            table,
            "delta_2",
            &["e_eg_branch", "e_ge_branch"],
            &cfg.name,
        ),
        Kind::UnitaryDynamics | Kind::EffectiveDynamics | Kind::MasterDynamics
        | Kind::PhysicalUnits => line_plot(table, "t", &["p_e1g2", "p_g1e2"], &cfg.name),
        Kind::ParameterSweep => {
            let sweep = cfg.sweep.as_ref().ok_or_else(|| {
                CliError::config("outputs.plot", "sweep section missing".to_string())
            })?;
            match sweep.observable {
                SweepObservable::Dynamics => {
                    let x = table
                        .columns
                        .first()
                        .ok_or_else(|| {
                            CliError::config("outputs.plot", "empty table".to_string())
                        })?
                        .name
                        .clone();
                    heatmap(table, &x, "t", "p_g1e2", &cfg.name)
                }
                _ => line_plot(table, "r_p", &["enhancement"], &cfg.name),
            }
        }
    }
}

fn column_with_unit(table: &ResultTable, name: &str) -> Result<(Vec<f64>, String)> {
    let col = table
        .columns
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| {
            CliError::config(
                "outputs.plot",
                format!("unsupported column combination: {name} missing"),
            )
        })?;
    let label = if col.unit == "1" {
        col.name.clone()
    } else {
        format!("{} [{}]", col.name, col.unit)
    };
    let values = table.column(name).unwrap();
    Ok((values, label))
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn pad(lo: f64, hi: f64) -> (f64, f64) {
    let d = 0.04 * (hi - lo);
    (lo - d, hi + d)
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if !(1e-3..1e5).contains(&a) {
        return format!("{v:.2e}");
    }
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        ML + (x - self.x_lo) / (self.x_hi - self.x_lo) * (W - ML - MR)
    }
    fn py(&self, y: f64) -> f64 {
        H - MB - (y - self.y_lo) / (self.y_hi - self.y_lo) * (H - MT - MB)
    }
}

fn svg_header(out: &mut String, title: &str) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"13\">\n"
    ));
    out.push_str(&format!(
        "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" fill=\"#222\">{}</text>\n",
        W / 2.0,
        title
    ));
}

fn svg_axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    out.push_str(&format!(
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>\n",
        W - ML - MR,
        H - MT - MB
    ));
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = frame.x_lo + f * (frame.x_hi - frame.x_lo);
        let yv = frame.y_lo + f * (frame.y_hi - frame.y_lo);
        let px = frame.px(xv);
        let py = frame.py(yv);
        out.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{}\" x2=\"{px:.1}\" y2=\"{}\" stroke=\"#888\"/>\n",
            H - MB,
            H - MB + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{px:.1}\" y=\"{}\" text-anchor=\"middle\" fill=\"#333\">{}</text>\n",
            H - MB + 20.0,
            tick_label(xv)
        ));
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{py:.1}\" x2=\"{ML}\" y2=\"{py:.1}\" stroke=\"#888\"/>\n",
            ML - 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\" fill=\"#333\">{}</text>\n",
            ML - 9.0,
            py + 4.0,
            tick_label(yv)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"#222\">{}</text>\n",
        (ML + W - MR) / 2.0,
        H - 14.0,
        x_label
    ));
    out.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" fill=\"#222\" \
         transform=\"rotate(-90 18 {})\">{}</text>\n",
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0,
        y_label
    ));
}

fn line_plot(table: &ResultTable, x_name: &str, y_names: &[&str], title: &str) -> Result<String> {
    if table.rows.is_empty() {
        return Err(CliError::config("outputs.plot", "no rows to plot".to_string()));
    }
    let (xs, x_label) = column_with_unit(table, x_name)?;
    let mut series = Vec::new();
    for name in y_names {
        series.push((name.to_string(), column_with_unit(table, name)?.0));
    }

    let (x_lo, x_hi) = span(xs.iter().copied());
    let (y_lo, y_hi) = span(series.iter().flat_map(|(_, ys)| ys.iter().copied()));
    let (x_lo, x_hi) = pad(x_lo, x_hi);
    let (y_lo, y_hi) = pad(y_lo, y_hi);
    let frame = Frame { x_lo, x_hi, y_lo, y_hi };

    let mut out = String::new();
    svg_header(&mut out, title);
    svg_axes(&mut out, &frame, &x_label, "");

    for (k, (name, ys)) in series.iter().enumerate() {
        let color = LINE_COLORS[k % LINE_COLORS.len()];
        let mut points = String::new();
        for (x, y) in xs.iter().zip(ys) {
            if y.is_finite() {
                points.push_str(&format!("{:.1},{:.1} ", frame.px(*x), frame.py(*y)));
            }
        }
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            points.trim_end()
        ));
        let ly = MT + 18.0 + 18.0 * k as f64;
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            W - MR - 150.0,
            W - MR - 120.0
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" fill=\"#222\">{}</text>\n",
            W - MR - 112.0,
            ly + 4.0,
            name
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn heat_color(f: f64) -> String {
    let f = f.clamp(0.0, 1.0);
    let pos = f * (HEAT_STOPS.len() - 1) as f64;
    let i = (pos.floor() as usize).min(HEAT_STOPS.len() - 2);
    let t = pos - i as f64;
    let (r0, g0, b0) = HEAT_STOPS[i];
    let (r1, g1, b1) = HEAT_STOPS[i + 1];
    let ch = |a: f64, b: f64| ((a + t * (b - a)) * 255.0).round() as u8;
    format!("#{:02x}{:02x}{:02x}", ch(r0, r1), ch(g0, g1), ch(b0, b1))
}

/// Long-format heatmap: rows are (x, ..., y, ..., z) tuples with x varying
/// slowest. Raster is capped so huge sweeps stay a reasonable file size.
fn heatmap(
    table: &ResultTable,
    x_name: &str,
    y_name: &str,
    z_name: &str,
    title: &str,
) -> Result<String> {
    if table.rows.is_empty() {
        return Err(CliError::config("outputs.plot", "no rows to plot".to_string()));
    }
    let (xs, x_label) = column_with_unit(table, x_name)?;
    let (ys, y_label) = column_with_unit(table, y_name)?;
    let (zs, _) = column_with_unit(table, z_name)?;

    // Unique grid values in first-appearance order.
    let mut x_vals: Vec<f64> = Vec::new();
    for &x in &xs {
        if x_vals.last() != Some(&x) && !x_vals.contains(&x) {
            x_vals.push(x);
        }
    }
    let ny = xs.len() / x_vals.len();
    if x_vals.len() * ny != xs.len() || ny == 0 {
        return Err(CliError::config(
            "outputs.plot",
            "sweep rows do not form a rectangular grid".to_string(),
        ));
    }
    let y_vals: Vec<f64> = ys[..ny].to_vec();

    let (z_lo, z_hi) = span(zs.iter().copied());
    let frame = Frame {
        x_lo: x_vals[0],
        x_hi: *x_vals.last().unwrap(),
        y_lo: y_vals[0],
        y_hi: *y_vals.last().unwrap(),
    };

    let mut out = String::new();
    svg_header(&mut out, title);

    let nx_px = x_vals.len().min(220);
    let ny_px = ny.min(220);
    let cw = (W - ML - MR) / nx_px as f64;
    let chh = (H - MT - MB) / ny_px as f64;
    for ix in 0..nx_px {
        let sx = ix * x_vals.len() / nx_px;
        for iy in 0..ny_px {
            let sy = iy * ny / ny_px;
            let z = zs[sx * ny + sy];
            let f = if z_hi > z_lo { (z - z_lo) / (z_hi - z_lo) } else { 0.5 };
            let px = ML + ix as f64 * cw;
            let py = H - MB - (iy + 1) as f64 * chh;
            out.push_str(&format!(
                "<rect x=\"{px:.1}\" y=\"{py:.1}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>\n",
                cw + 0.5,
                chh + 0.5,
                heat_color(f)
            ));
        }
    }
    svg_axes(&mut out, &frame, &x_label, &y_label);
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" fill=\"#222\">{}: {} to {}</text>\n",
        W - MR,
        MT - 8.0,
        z_name,
        tick_label(z_lo),
        tick_label(z_hi)
    ));
    out.push_str("</svg>\n");
    Ok(out)
}
