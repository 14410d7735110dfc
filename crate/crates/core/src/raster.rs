//! Region maps over the `(λ, β)` plane, where `β = β1/β2` and `λ = λ1/λ2`.
//!
//! Each pixel is evaluated at its center with `β2 = λ2 = 1`. Rows run from
//! large `β` (top) to small `β` (bottom).

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::regions::{classify_case, monotone_threshold, ChemoParams, Extended};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RasterMode {
    /// Color by positivity case (1, 2, 3).
    #[default]
    Positivity,
    /// Color by branch of the monotonicity threshold (1: unbounded, 2, 3).
    Monotonicity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RasterWindow {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub resolution: usize,
}

impl Default for RasterWindow {
    fn default() -> Self {
        Self {
            lambda_min: 0.05,
            lambda_max: 3.0,
            beta_min: 0.05,
            beta_max: 3.0,
            resolution: 512,
        }
    }
}

impl RasterWindow {
    fn validate(&self) -> Result<()> {
        let ok = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo;
        if !ok(self.lambda_min, self.lambda_max) || !ok(self.beta_min, self.beta_max) {
            return Err(Error::Config(format!("invalid raster window {self:?}")));
        }
        if self.resolution == 0 || self.resolution > 16384 {
            return Err(Error::Config(format!("raster resolution {} out of range", self.resolution)));
        }
        Ok(())
    }

    pub fn pixel_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        let n = self.resolution as f64;
        let dl = (self.lambda_max - self.lambda_min) / n;
        let db = (self.beta_max - self.beta_min) / n;
        (
            self.lambda_min + (ix as f64 + 0.5) * dl,
            self.beta_max - (iy as f64 + 0.5) * db,
        )
    }

    /// Pixel containing `(λ, β)`, if inside the window.
    pub fn pixel_of(&self, lambda: f64, beta: f64) -> Option<(usize, usize)> {
        let n = self.resolution as f64;
        let fx = (lambda - self.lambda_min) / (self.lambda_max - self.lambda_min) * n;
        let fy = (self.beta_max - beta) / (self.beta_max - self.beta_min) * n;
        if !(0.0..n).contains(&fx) || !(0.0..n).contains(&fy) {
            return None;
        }
        Some((fx as usize, fy as usize))
    }
}

/// Region tag of a single `(λ, β)` point.
pub fn region_tag(mode: RasterMode, lambda: f64, beta: f64) -> Result<u8> {
    let params = ChemoParams::new(beta, 1.0, lambda, 1.0)?;
    Ok(match mode {
        RasterMode::Positivity => classify_case(&params).case.index(),
        RasterMode::Monotonicity => {
            if matches!(monotone_threshold(&params), Extended::Unbounded) {
                1
            } else if beta > lambda && beta >= lambda * lambda {
                2
            } else {
                3
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionRaster {
    pub window: RasterWindow,
    pub mode: RasterMode,
    /// Row-major tags, top row first.
    pub tags: Vec<u8>,
}

const PALETTE: [[u8; 3]; 4] = [[0, 0, 0], [70, 130, 180], [230, 159, 0], [150, 150, 150]];
const CURVE: [u8; 3] = [20, 20, 20];

/// The four boundary curves in the `(λ, β)` plane as zero sets.
const CURVES: [(&str, fn(f64, f64) -> f64); 4] = [
    ("beta = 1", |_, b| b - 1.0),
    ("beta = lambda", |l, b| b - l),
    ("beta = lambda^2", |l, b| b - l * l),
    ("beta * lambda = 1", |l, b| b * l - 1.0),
];

impl RegionRaster {
    pub fn compute(window: RasterWindow, mode: RasterMode, exec: Exec) -> Result<Self> {
        window.validate()?;
        let n = window.resolution;
        let tags = exec.map_range(n * n, |k| {
            let (l, b) = window.pixel_center(k % n, k / n);
            region_tag(mode, l, b)
        });
        Ok(Self {
            window,
            mode,
            tags: tags.into_iter().collect::<Result<_>>()?,
        })
    }

    pub fn tag(&self, ix: usize, iy: usize) -> u8 {
        self.tags[iy * self.window.resolution + ix]
    }

    pub fn tag_at(&self, lambda: f64, beta: f64) -> Option<u8> {
        self.window.pixel_of(lambda, beta).map(|(ix, iy)| self.tag(ix, iy))
    }

    /// Pixel counts for tags 1, 2, 3.
    pub fn counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for &t in &self.tags {
            c[(t - 1) as usize] += 1;
        }
        c
    }

    pub fn legend(&self) -> Vec<(u8, &'static str, [u8; 3])> {
        let labels = match self.mode {
            RasterMode::Positivity => ["case 1: A* unbounded", "case 2", "case 3"],
            RasterMode::Monotonicity => ["monotone for all A", "finite: beta > lambda, beta >= lambda^2", "finite: remaining wedge"],
        };
        (1..=3).map(|t| (t, labels[t as usize - 1], PALETTE[t as usize])).collect()
    }

    /// Whether a boundary curve passes through the pixel (sign change over its corners).
    fn on_curve(&self, ix: usize, iy: usize) -> bool {
        let w = &self.window;
        let n = w.resolution as f64;
        let dl = (w.lambda_max - w.lambda_min) / n;
        let db = (w.beta_max - w.beta_min) / n;
        let l0 = w.lambda_min + ix as f64 * dl;
        let b1 = w.beta_max - iy as f64 * db;
        CURVES.iter().any(|(_, c)| {
            let v = [c(l0, b1), c(l0 + dl, b1), c(l0, b1 - db), c(l0 + dl, b1 - db)];
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            lo <= 0.0 && hi >= 0.0
        })
    }

    /// Binary PPM (P6) with boundary curves drawn over the region colors.
    pub fn write_ppm<W: Write>(&self, mut out: W) -> Result<()> {
        let n = self.window.resolution;
        write!(out, "P6\n{n} {n}\n255\n")?;
        let mut buf = Vec::with_capacity(3 * n * n);
        for iy in 0..n {
            for ix in 0..n {
                let rgb = if self.on_curve(ix, iy) {
                    CURVE
                } else {
                    PALETTE[self.tag(ix, iy) as usize]
                };
                buf.extend_from_slice(&rgb);
            }
        }
        out.write_all(&buf)?;
        Ok(())
    }

    /// SVG rendering: run-length rectangles per row, curves as polylines, and a legend.
    pub fn to_svg(&self) -> String {
        let n = self.window.resolution;
        let w = &self.window;
        let mut s = String::new();
        let size = n + 220;
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{n}" viewBox="0 0 {size} {n}" shape-rendering="crispEdges">"#
        );
        for iy in 0..n {
            let mut ix = 0;
            while ix < n {
                let t = self.tag(ix, iy);
                let start = ix;
                while ix < n && self.tag(ix, iy) == t {
                    ix += 1;
                }
                let [r, g, b] = PALETTE[t as usize];
                let _ = writeln!(
                    s,
                    r#"<rect x="{start}" y="{iy}" width="{}" height="1" fill="rgb({r},{g},{b})"/>"#,
                    ix - start
                );
            }
        }
        let to_px = |l: f64, b: f64| {
            (
                (l - w.lambda_min) / (w.lambda_max - w.lambda_min) * n as f64,
                (w.beta_max - b) / (w.beta_max - w.beta_min) * n as f64,
            )
        };
        let samples = 400;
        for (label, _) in CURVES {
            let beta_of: fn(f64) -> f64 = match label {
                "beta = 1" => |_| 1.0,
                "beta = lambda" => |l| l,
                "beta = lambda^2" => |l| l * l,
                _ => |l| 1.0 / l,
            };
            let mut pts = String::new();
            for k in 0..=samples {
                let l = w.lambda_min + (w.lambda_max - w.lambda_min) * k as f64 / samples as f64;
                let b = beta_of(l).clamp(w.beta_min, w.beta_max);
                let (x, y) = to_px(l, b);
                let _ = write!(pts, "{x:.3},{y:.3} ");
            }
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="rgb(20,20,20)" stroke-width="1.5"><title>{label}</title></polyline>"#,
                pts.trim_end()
            );
        }
        for (k, (_, label, [r, g, b])) in self.legend().into_iter().enumerate() {
            let y = 20 + 24 * k;
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{y}" width="16" height="16" fill="rgb({r},{g},{b})"/><text x="{}" y="{}" font-size="12" font-family="sans-serif">{label}</text>"#,
                n + 10,
                n + 32,
                y + 12
            );
        }
        s.push_str("</svg>\n");
        s
    }
}
