//! The combinatorial Yamabe flow `dw_i/dt = B_i(w)`, `w(0) = 0`.
//!
//! It is the gradient flow of the concave energy `Ē`, so `Σ B_i²` decreases
//! and `Ē` increases along it. Every `B_i` stays positive, so `w` grows,
//! every edge lengthens and each boundary component shrinks towards a cusp.
//! The limit is only reached at `t = ∞`; runs stop at a time limit, when
//! `max B` falls below `cusp_tol`, or when the shortest edge exceeds
//! `length_cap`.
//!
//! Integration is classical RK4 with step doubling for the local error and
//! a PI step-size controller.

use std::fmt;
use std::io::{self, Write};

use crate::conformal::{evaluate, SurfaceGeometry};
use crate::error::{Error, Result};
use crate::sig17;
use crate::surface::{IdealTriangulation, Metric};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub t_end: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Spacing of the exported trace; `None` exports every accepted step.
    pub sample_dt: Option<f64>,
    pub cusp_tol: f64,
    pub length_cap: f64,
    pub initial_step: f64,
    pub min_step: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            t_end: 100.0,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            sample_dt: None,
            cusp_tol: 1e-6,
            length_cap: 600.0,
            initial_step: 1e-3,
            min_step: 1e-12,
        }
    }
}

impl FlowOptions {
    pub fn check(&self) -> Result<()> {
        let named = [
            ("t_end", self.t_end),
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("cusp_tol", self.cusp_tol),
            ("length_cap", self.length_cap),
            ("initial_step", self.initial_step),
            ("min_step", self.min_step),
            ("sample_dt", self.sample_dt.unwrap_or(1.0)),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Options(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for FlowOptions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t_end={} rel_tol={:e} abs_tol={:e} cusp_tol={:e} length_cap={} initial_step={:e} min_step={:e} sample_dt={}",
            self.t_end,
            self.rel_tol,
            self.abs_tol,
            self.cusp_tol,
            self.length_cap,
            self.initial_step,
            self.min_step,
            self.sample_dt.map_or("accepted-steps".to_string(), |d| d.to_string()),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    TimeLimit,
    Cusp,
    LengthCap,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::TimeLimit => "t_end reached",
            StopReason::Cusp => "max B below cusp_tol",
            StopReason::LengthCap => "min edge length above length_cap",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowRow {
    pub t: f64,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
    /// `Σ B_i²`.
    pub s: f64,
    pub min_len: f64,
    pub max_arc: f64,
}

impl FlowRow {
    fn new(t: f64, w: Vec<f64>, g: &SurfaceGeometry) -> Self {
        Self {
            t,
            w,
            b: g.boundary.to_vec(),
            s: g.boundary.sum_of_squares(),
            min_len: g.min_edge_length(),
            max_arc: g.max_arc(),
        }
    }

    fn lerp(a: &FlowRow, b: &FlowRow, t: f64) -> FlowRow {
        let f = (t - a.t) / (b.t - a.t);
        let mix = |x: f64, y: f64| x + f * (y - x);
        let mix_vec = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(&x, &y)| mix(x, y)).collect();
        FlowRow {
            t,
            w: mix_vec(&a.w, &b.w),
            b: mix_vec(&a.b, &b.b),
            s: mix(a.s, b.s),
            min_len: mix(a.min_len, b.min_len),
            max_arc: mix(a.max_arc, b.max_arc),
        }
    }
}

/// Accepted steps of one flow run, starting with the row at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    pub rows: Vec<FlowRow>,
    pub stop: StopReason,
    /// Sum over accepted steps of the max-norm local error estimate.
    pub error_estimate: f64,
    pub rejected_steps: usize,
}

impl FlowTrace {
    pub fn last(&self) -> &FlowRow {
        self.rows
            .last()
            .expect("trace always holds the initial row")
    }

    /// Rows on the grid `0, dt, 2dt, ...` interpolated linearly between
    /// accepted steps, followed by the final accepted row.
    pub fn sampled(&self, dt: f64) -> Vec<FlowRow> {
        let last = self.last();
        let mut out = Vec::new();
        let mut seg = 0;
        let mut k = 0u64;
        loop {
            let t = k as f64 * dt;
            if t >= last.t {
                break;
            }
            while self.rows[seg + 1].t < t {
                seg += 1;
            }
            let (a, b) = (&self.rows[seg], &self.rows[seg + 1]);
            out.push(if t == a.t {
                a.clone()
            } else {
                FlowRow::lerp(a, b, t)
            });
            k += 1;
        }
        out.push(last.clone());
        out
    }

    /// Pairs of consecutive accepted steps where `S` fails to decrease or
    /// some `w_i` fails to increase.
    pub fn monotonicity_violations(&self) -> Vec<usize> {
        self.rows
            .windows(2)
            .enumerate()
            .filter(|(_, p)| {
                !(p[1].s < p[0].s) || p[1].w.iter().zip(&p[0].w).any(|(x, y)| !(x > y))
            })
            .map(|(k, _)| k)
            .collect()
    }
}

/// Write rows as CSV with header `t,S,minLen,maxArc,w_1..w_n,B_1..B_n`.
pub fn write_trace_csv<W: Write + ?Sized>(out: &mut W, rows: &[FlowRow]) -> io::Result<()> {
    let n = rows.first().map_or(0, |r| r.w.len());
    let mut header = String::from("t,S,minLen,maxArc");
    for i in 1..=n {
        header.push_str(&format!(",w_{i}"));
    }
    for i in 1..=n {
        header.push_str(&format!(",B_{i}"));
    }
    writeln!(out, "{header}")?;
    for r in rows {
        let mut fields = vec![sig17(r.t), sig17(r.s), sig17(r.min_len), sig17(r.max_arc)];
        fields.extend(r.w.iter().map(|&v| sig17(v)));
        fields.extend(r.b.iter().map(|&v| sig17(v)));
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

struct Rhs<'a> {
    tri: &'a IdealTriangulation,
    l0: &'a Metric,
    t: f64,
}

impl Rhs<'_> {
    fn geometry(&self, w: &[f64]) -> Result<SurfaceGeometry> {
        evaluate(self.tri, self.l0, w).map_err(|e| match e {
            Error::Domain { .. } => Error::FlowDomain { t: self.t },
            other => other,
        })
    }

    fn eval(&self, w: &[f64]) -> Result<Vec<f64>> {
        self.geometry(w).map(|g| g.boundary.into_inner())
    }

    /// One RK4 step of size `h` from `w`, given `k1 = B(w)`.
    fn rk4(&self, w: &[f64], k1: &[f64], h: f64) -> Result<Vec<f64>> {
        let axpy =
            |k: &[f64], a: f64| -> Vec<f64> { w.iter().zip(k).map(|(w, k)| w + a * k).collect() };
        let k2 = self.eval(&axpy(k1, 0.5 * h))?;
        let k3 = self.eval(&axpy(&k2, 0.5 * h))?;
        let k4 = self.eval(&axpy(&k3, h))?;
        Ok((0..w.len())
            .map(|i| w[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect())
    }
}

const SAFETY: f64 = 0.9;
const MAX_GROWTH: f64 = 5.0;
const MAX_SHRINK: f64 = 0.2;
// PI gains for a 4th-order error estimate
const ALPHA: f64 = 0.7 / 5.0;
const BETA: f64 = 0.4 / 5.0;

/// Integrate the flow from `w = 0`.
pub fn integrate_flow(
    tri: &IdealTriangulation,
    l0: &Metric,
    opts: &FlowOptions,
) -> Result<FlowTrace> {
    opts.check()?;
    let n = tri.n_boundaries();
    let mut rhs = Rhs { tri, l0, t: 0.0 };
    let mut w = vec![0.0; n];
    let mut geom = rhs.geometry(&w)?;
    if opts.cusp_tol >= geom.boundary.max() {
        return Err(Error::Options(format!(
            "cusp_tol {:e} is not below the initial max B {:e}",
            opts.cusp_tol,
            geom.boundary.max()
        )));
    }
    let mut rows = vec![FlowRow::new(0.0, w.clone(), &geom)];
    let mut t = 0.0;
    let mut h = opts.initial_step.min(opts.t_end);
    let mut prev_err: f64 = 1.0;
    let mut error_estimate = 0.0;
    let mut rejected_steps = 0;

    let stop = loop {
        if t >= opts.t_end {
            break StopReason::TimeLimit;
        }
        if geom.boundary.max() < opts.cusp_tol {
            break StopReason::Cusp;
        }
        if geom.min_edge_length() > opts.length_cap {
            break StopReason::LengthCap;
        }
        let last_step = t + h >= opts.t_end;
        if last_step {
            h = opts.t_end - t;
        }
        rhs.t = t;
        let k1 = geom.boundary.to_vec();
        let full = rhs.rk4(&w, &k1, h)?;
        let mid = rhs.rk4(&w, &k1, 0.5 * h)?;
        let k_mid = rhs.eval(&mid)?;
        let halves = rhs.rk4(&mid, &k_mid, 0.5 * h)?;

        let mut err: f64 = 0.0;
        let mut err_abs: f64 = 0.0;
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let e = (halves[i] - full[i]) / 15.0;
            let y = halves[i] + e;
            let scale = opts.abs_tol + opts.rel_tol * w[i].abs().max(y.abs());
            err = err.max(e.abs() / scale);
            err_abs = err_abs.max(e.abs());
            next.push(y);
        }

        if err <= 1.0 {
            t = if last_step { opts.t_end } else { t + h };
            rhs.t = t;
            geom = rhs.geometry(&next)?;
            w = next;
            rows.push(FlowRow::new(t, w.clone(), &geom));
            error_estimate += err_abs;
            let factor = if err == 0.0 {
                MAX_GROWTH
            } else {
                SAFETY * err.powf(-ALPHA) * prev_err.powf(BETA)
            };
            h *= factor.clamp(MAX_SHRINK, MAX_GROWTH);
            prev_err = err.max(1e-4);
        } else {
            rejected_steps += 1;
            h *= (SAFETY * err.powf(-0.2)).max(MAX_SHRINK);
        }
        if h < opts.min_step {
            return Err(Error::StepUnderflow { t, h });
        }
    };
    Ok(FlowTrace {
        rows,
        stop,
        error_estimate,
        rejected_steps,
    })
}

/// Summary of how close the surface at `w` is to having cusps.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspReport {
    pub max_b: f64,
    pub min_edge: f64,
    pub max_edge: f64,
    pub max_arc: f64,
    pub b: Vec<f64>,
}

impl fmt::Display for CuspReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max_B={} min_edge={} max_edge={} max_arc={}",
            sig17(self.max_b),
            sig17(self.min_edge),
            sig17(self.max_edge),
            sig17(self.max_arc)
        )
    }
}

pub fn cusp_report(tri: &IdealTriangulation, l0: &Metric, w: &[f64]) -> Result<CuspReport> {
    let g = evaluate(tri, l0, w)?;
    Ok(CuspReport {
        max_b: g.boundary.max(),
        min_edge: g.min_edge_length(),
        max_edge: g.max_edge_length(),
        max_arc: g.max_arc(),
        b: g.boundary.into_inner(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_surface;
    use approx::assert_relative_eq;

    const PANTS: &str = include_str!("../../../fixtures/pants.surf");
    const EQUILATERAL: &str = include_str!("../../../fixtures/pants_equilateral.surf");

    #[test]
    fn initial_row_of_pants() {
        let (tri, l0) = parse_surface(EQUILATERAL).unwrap();
        let opts = FlowOptions {
            t_end: 0.5,
            ..Default::default()
        };
        let trace = integrate_flow(&tri, &l0, &opts).unwrap();
        let r0 = &trace.rows[0];
        assert_eq!(r0.t, 0.0);
        for &b in &r0.b {
            assert_relative_eq!(b, 2.6339157938496336, max_relative = 1e-14);
        }
        assert_relative_eq!(
            r0.s,
            3.0 * 2.6339157938496336f64.powi(2),
            max_relative = 1e-14
        );
        assert_relative_eq!(r0.s, 20.812537227271634, max_relative = 1e-14);
        assert_eq!(trace.stop, StopReason::TimeLimit);
        assert_eq!(trace.last().t, 0.5);
        assert!(trace.monotonicity_violations().is_empty());
    }

    #[test]
    fn cusp_report_at_zero() {
        let (tri, l0) = parse_surface(PANTS).unwrap();
        let r = cusp_report(&tri, &l0, &[0.0; 3]).unwrap();
        assert_relative_eq!(r.min_edge, 2.6339157938496336, max_relative = 1e-14);
        assert_relative_eq!(r.max_b, 1.1392362000733852, max_relative = 1e-14);
        assert_relative_eq!(r.max_arc, 0.5696181000366926, max_relative = 1e-14);

        let r = cusp_report(&tri, &l0, &[250.0, 260.0, 255.0]).unwrap();
        assert!(r.min_edge > 1000.0);
        assert!(r.max_b.is_finite() && r.max_b > 0.0);
        assert!(r.max_arc.is_finite());
    }

    #[test]
    fn rejects_bad_options() {
        let (tri, l0) = parse_surface(PANTS).unwrap();
        let opts = FlowOptions {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            integrate_flow(&tri, &l0, &opts),
            Err(Error::Options(_))
        ));
        let opts = FlowOptions {
            cusp_tol: 5.0,
            ..Default::default()
        };
        assert!(matches!(
            integrate_flow(&tri, &l0, &opts),
            Err(Error::Options(_))
        ));
        let opts = FlowOptions {
            sample_dt: Some(-1.0),
            ..Default::default()
        };
        assert!(integrate_flow(&tri, &l0, &opts).is_err());
    }

    #[test]
    fn length_cap_stops_the_run() {
        let (tri, l0) = parse_surface(PANTS).unwrap();
        let opts = FlowOptions {
            t_end: 1e9,
            length_cap: 8.0,
            cusp_tol: 1e-12,
            ..Default::default()
        };
        let trace = integrate_flow(&tri, &l0, &opts).unwrap();
        assert_eq!(trace.stop, StopReason::LengthCap);
        assert!(trace.last().min_len > 8.0);
    }

    #[test]
    fn tiny_min_step_underflows() {
        let (tri, l0) = parse_surface(PANTS).unwrap();
        let opts = FlowOptions {
            rel_tol: 1e-30,
            abs_tol: 1e-30,
            min_step: 1e-3,
            ..Default::default()
        };
        assert!(matches!(
            integrate_flow(&tri, &l0, &opts),
            Err(Error::StepUnderflow { .. })
        ));
    }

    #[test]
    fn sampling_and_csv() {
        let (tri, l0) = parse_surface(PANTS).unwrap();
        let opts = FlowOptions {
            t_end: 1.05,
            ..Default::default()
        };
        let trace = integrate_flow(&tri, &l0, &opts).unwrap();
        let rows = trace.sampled(0.25);
        let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
        assert_eq!(ts, vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.05]);
        assert!(rows.windows(2).all(|p| p[1].s < p[0].s));

        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,S,minLen,maxArc,w_1,w_2,w_3,B_1,B_2,B_3"
        );
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 10);
        assert_eq!(first[0], sig17(0.0));
        assert_eq!(first[4].parse::<f64>().unwrap(), 0.0);
        assert_eq!(text.lines().count(), rows.len() + 1);
    }

    /// Symmetric pants with `l0 = 2 acosh 2`: all `w_i` equal `s` and
    /// `ds/dt = 2θ(s)` with `cosh θ - 1 = 1/(8 e^{4s} - 2)`.
    fn reference_rate(s: f64) -> f64 {
        let c_minus_one = 8.0 * (4.0 * s).exp() - 2.0;
        4.0 * (0.5 / c_minus_one).sqrt().asinh()
    }

    fn reference_solution(times: &[f64]) -> Vec<f64> {
        let h = 1e-3f64;
        let mut out = Vec::new();
        let (mut t, mut s) = (0.0f64, 0.0f64);
        for &target in times {
            while t < target {
                let step = h.min(target - t);
                let k1 = reference_rate(s);
                let k2 = reference_rate(s + 0.5 * step * k1);
                let k3 = reference_rate(s + 0.5 * step * k2);
                let k4 = reference_rate(s + step * k3);
                s += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t += step;
                if (target - t).abs() < 1e-14 {
                    t = target;
                }
            }
            out.push(s);
        }
        out
    }

    #[test]
    fn symmetric_pants_matches_scalar_ode() {
        assert_relative_eq!(
            reference_rate(0.0),
            1.1392362000733852,
            max_relative = 1e-14
        );
        let (tri, l0) = parse_surface(PANTS).unwrap();
        let opts = FlowOptions {
            t_end: 20.0,
            ..Default::default()
        };
        let trace = integrate_flow(&tri, &l0, &opts).unwrap();
        let times: Vec<f64> = trace.rows.iter().map(|r| r.t).collect();
        let reference = reference_solution(&times);
        for (row, s) in trace.rows.iter().zip(&reference) {
            for &w in &row.w {
                assert_relative_eq!(w, *s, max_relative = 1e-7, epsilon = 1e-12);
            }
            for &b in &row.b {
                assert_relative_eq!(b, reference_rate(*s), max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn pants_flow_reaches_cusp() {
        let (tri, l0) = parse_surface(PANTS).unwrap();
        let opts = FlowOptions {
            t_end: 1e6,
            cusp_tol: 1e-4,
            ..Default::default()
        };
        let trace = integrate_flow(&tri, &l0, &opts).unwrap();
        assert_eq!(trace.stop, StopReason::Cusp);
        let last = trace.last();
        assert!(last.b.iter().all(|&b| b > 0.0 && b < 1e-4));
        assert!(last.min_len > 15.0, "{}", last.min_len);
        assert!(trace.monotonicity_violations().is_empty());
        // B ~ 1/(2t) near the cusp
        assert!(last.t > 2000.0 && last.t < 1e4, "{}", last.t);
        assert!(trace.rows.len() < 5000, "{} steps", trace.rows.len());
    }
}
