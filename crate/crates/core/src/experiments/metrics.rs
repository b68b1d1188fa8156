use std::fmt::Write as _;

/// One solved test instance. `None` fields are written as empty cells.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    /// Number of components in the layout.
    pub m: usize,
    pub trial: usize,
    pub epsilon: Option<f64>,
    pub fom_assembly_s: Option<f64>,
    pub fom_solve_s: Option<f64>,
    /// Matrix assembly plus rhs projection.
    pub rom_assembly_s: f64,
    pub rom_solve_s: f64,
    /// Krylov iterations; 0 for the direct solvers.
    pub iterations: usize,
    pub rank: usize,
    pub rom_matrix_s: f64,
    pub rom_rhs_s: f64,
}

impl MetricsRow {
    pub const HEADER: &'static str =
        "m,trial,epsilon,fom_assembly_s,fom_solve_s,rom_assembly_s,rom_solve_s,iterations,rank,rom_matrix_s,rom_rhs_s";

    /// Indices of wall-clock columns.
    pub const TIMING_COLUMNS: &'static [usize] = &[3, 4, 5, 6, 9, 10];
}

fn opt(v: Option<f64>, exact: bool) -> String {
    match (v, exact) {
        (Some(x), true) => format!("{x:.16e}"),
        (Some(x), false) => format!("{x:.6e}"),
        (None, _) => String::new(),
    }
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut s = String::from(MetricsRow::HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{:.6e},{:.6e},{},{},{:.6e},{:.6e}",
            r.m,
            r.trial,
            opt(r.epsilon, true),
            opt(r.fom_assembly_s, false),
            opt(r.fom_solve_s, false),
            r.rom_assembly_s,
            r.rom_solve_s,
            r.iterations,
            r.rank,
            r.rom_matrix_s,
            r.rom_rhs_s
        );
    }
    s
}

/// Blanks the given columns of a CSV so runs can be compared on everything
/// but wall time.
pub fn strip_columns(csv: &str, columns: &[usize]) -> String {
    csv.lines()
        .enumerate()
        .map(|(i, line)| {
            if i == 0 {
                return line.to_string();
            }
            line.split(',')
                .enumerate()
                .map(|(j, f)| if columns.contains(&j) { "" } else { f })
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Median of the finite values, `None` if there are none.
pub fn median(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// One refinement level of the manufactured-solution study.
#[derive(Clone, Debug, PartialEq)]
pub struct MmsRow {
    pub h: f64,
    pub dofs: usize,
    /// Relative L2 errors; the pressure is compared up to its mean.
    pub velocity_error: f64,
    pub pressure_error: f64,
    /// Observed orders against the previous level.
    pub velocity_order: Option<f64>,
    pub pressure_order: Option<f64>,
    pub iterations_plain: usize,
    pub iterations_precond: usize,
    pub converged_plain: bool,
    pub converged_precond: bool,
    pub residual_plain: f64,
    pub residual_precond: f64,
    pub seconds_plain: f64,
    pub seconds_precond: f64,
}

impl MmsRow {
    pub const HEADER: &'static str = "h,dofs,velocity_error,pressure_error,velocity_order,pressure_order,\
iterations_plain,iterations_precond,converged_plain,converged_precond,residual_plain,residual_precond,\
seconds_plain,seconds_precond";

    pub const TIMING_COLUMNS: &'static [usize] = &[12, 13];
}

pub fn mms_csv(rows: &[MmsRow]) -> String {
    let mut s = String::from(MmsRow::HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{:.16e},{},{:.16e},{:.16e},{},{},{},{},{},{},{:.16e},{:.16e},{:.6e},{:.6e}",
            r.h,
            r.dofs,
            r.velocity_error,
            r.pressure_error,
            opt(r.velocity_order, true),
            opt(r.pressure_order, true),
            r.iterations_plain,
            r.iterations_precond,
            r.converged_plain,
            r.converged_precond,
            r.residual_plain,
            r.residual_precond,
            r.seconds_plain,
            r.seconds_precond
        );
    }
    s
}
