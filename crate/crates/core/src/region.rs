//! Geometric localization regions in the complex plane.
//!
//! A region is an intersection of *families*; each family is a union of
//! *stadiums* (discs whose centers sweep a real interval — the degenerate
//! zero-length interval gives an ordinary disc). Families come from row
//! sums, column sums, or blended radii, under any diagonal scaling, and a
//! region may stack families built with different scalings: eigenvalues lie
//! in every family, hence in the intersection.
//!
//! Extent queries exploit two structural facts. Every member is convex and
//! symmetric about the real axis, so for any region point `z` the real
//! point `Re z` also belongs to the region; the real extent therefore
//! equals the extent of the region's slice along the real axis, which is an
//! exact interval computation. The imaginary extent is bounded from above
//! by a scan: between consecutive member break-abscissas each member's
//! vertical half-extent is monotone, so its supremum over a scan window is
//! attained at a window edge, making the reported value a certified upper
//! bound that tightens as the scan resolution shrinks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::blend;
use crate::matrix::{IntervalMatrix, RealMatrix, Scaling};

#[derive(Debug, Error)]
pub enum RegionError {
    #[error("canvas must have nonzero pixel dimensions")]
    ZeroCanvas,
}

/// Union of equal-radius discs with centers sweeping `[center_lo,
/// center_hi]` on the real axis; a disc when the sweep is a single point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stadium {
    pub center_lo: f64,
    pub center_hi: f64,
    pub radius: f64,
}

impl Stadium {
    pub fn disc(center: f64, radius: f64) -> Self {
        Stadium { center_lo: center, center_hi: center, radius }
    }

    /// Horizontal distance from `x` to the center segment.
    fn axis_dist(&self, x: f64) -> f64 {
        (self.center_lo - x).max(x - self.center_hi).max(0.0)
    }

    /// Distance to the boundary: negative inside, positive outside.
    pub fn signed_distance(&self, re: f64, im: f64) -> f64 {
        self.axis_dist(re).hypot(im) - self.radius
    }

    pub fn contains(&self, re: f64, im: f64) -> bool {
        self.signed_distance(re, im) <= 0.0
    }

    /// Largest `|Im|` the stadium reaches at abscissa `x`, if it reaches
    /// `x` at all.
    fn half_height(&self, x: f64) -> Option<f64> {
        let d = self.axis_dist(x);
        if d > self.radius {
            None
        } else {
            Some((self.radius * self.radius - d * d).sqrt())
        }
    }

    /// The stadium's slice along the real axis.
    fn real_interval(&self) -> (f64, f64) {
        (self.center_lo - self.radius, self.center_hi + self.radius)
    }
}

/// Which radius formula produced a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyLabel {
    Rows,
    Cols,
    Ostrowski,
}

/// A union of stadiums guaranteed to contain every eigenvalue on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscFamily {
    pub label: FamilyLabel,
    pub members: Vec<Stadium>,
}

/// Intersection of families: a point belongs to the region iff every
/// family has a member containing it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub families: Vec<DiscFamily>,
}

/// Disc construction mode: the row/column pair of families, or the single
/// blended-radius family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionMode {
    RowsCols,
    Ostrowski,
}

/// Builds disc families for a constant matrix.
///
/// # Panics
/// If the scaling length does not match the matrix dimension.
pub fn build_families(
    q: &RealMatrix,
    scaling: Option<&Scaling>,
    mode: RegionMode,
) -> Vec<DiscFamily> {
    let n = q.n();
    if let Some(s) = scaling {
        assert_eq!(s.len(), n, "scaling length mismatch");
    }
    match mode {
        RegionMode::RowsCols => {
            let rows = (0..n)
                .map(|i| Stadium::disc(q.get(i, i), q.row_radius(i, scaling)))
                .collect();
            let cols = (0..n)
                .map(|j| Stadium::disc(q.get(j, j), q.col_radius(j, scaling)))
                .collect();
            vec![
                DiscFamily { label: FamilyLabel::Rows, members: rows },
                DiscFamily { label: FamilyLabel::Cols, members: cols },
            ]
        }
        RegionMode::Ostrowski => {
            let alpha = scaling.map_or(0.5, Scaling::alpha);
            let members = (0..n)
                .map(|i| {
                    let r = q.row_radius(i, scaling);
                    let c = q.col_radius(i, scaling);
                    Stadium::disc(q.get(i, i), blend(r, c, alpha))
                })
                .collect();
            vec![DiscFamily { label: FamilyLabel::Ostrowski, members }]
        }
    }
}

/// Builds stadium families for an interval matrix: centers sweep the
/// diagonal intervals and radii absorb the off-diagonal magnitudes.
///
/// # Panics
/// If the scaling length does not match the matrix dimension.
pub fn build_interval_families(
    m: &IntervalMatrix,
    scaling: Option<&Scaling>,
    mode: RegionMode,
) -> Vec<DiscFamily> {
    let n = m.n();
    if let Some(s) = scaling {
        assert_eq!(s.len(), n, "scaling length mismatch");
    }
    let center = |i: usize| {
        let q0 = m.nominal().get(i, i);
        (q0 + m.diag_lo()[i], q0 + m.diag_hi()[i])
    };
    match mode {
        RegionMode::RowsCols => {
            let rows = (0..n)
                .map(|i| {
                    let (lo, hi) = center(i);
                    Stadium { center_lo: lo, center_hi: hi, radius: m.hat_row_radius(i, scaling) }
                })
                .collect();
            let cols = (0..n)
                .map(|j| {
                    let (lo, hi) = center(j);
                    Stadium { center_lo: lo, center_hi: hi, radius: m.hat_col_radius(j, scaling) }
                })
                .collect();
            vec![
                DiscFamily { label: FamilyLabel::Rows, members: rows },
                DiscFamily { label: FamilyLabel::Cols, members: cols },
            ]
        }
        RegionMode::Ostrowski => {
            let alpha = scaling.map_or(0.5, Scaling::alpha);
            let members = (0..n)
                .map(|i| {
                    let (lo, hi) = center(i);
                    let r = m.hat_row_radius(i, scaling);
                    let c = m.hat_col_radius(i, scaling);
                    Stadium { center_lo: lo, center_hi: hi, radius: blend(r, c, alpha) }
                })
                .collect();
            vec![DiscFamily { label: FamilyLabel::Ostrowski, members }]
        }
    }
}

/// Merges possibly-overlapping intervals into a disjoint sorted list.
fn merge_intervals(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (lo, hi) in v {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// Intersects two disjoint sorted interval lists.
fn intersect_lists(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo <= hi {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

impl Region {
    pub fn new(families: Vec<DiscFamily>) -> Self {
        Region { families }
    }

    /// Adds another family; the region can only shrink.
    pub fn push(&mut self, family: DiscFamily) {
        self.families.push(family);
    }

    /// Membership is closed: boundary points count as inside.
    pub fn contains(&self, re: f64, im: f64) -> bool {
        self.families
            .iter()
            .all(|f| f.members.iter().any(|s| s.contains(re, im)))
    }

    /// Max over families of the distance to the nearest member: ≤ 0 inside
    /// the region, > 0 outside (how far past the tightest family).
    pub fn signed_distance(&self, re: f64, im: f64) -> f64 {
        self.families
            .iter()
            .map(|f| {
                f.members
                    .iter()
                    .map(|s| s.signed_distance(re, im))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The region's slice along the real axis as a disjoint interval list;
    /// empty when the families fail to overlap.
    fn real_slice(&self) -> Vec<(f64, f64)> {
        let mut acc: Option<Vec<(f64, f64)>> = None;
        for f in &self.families {
            let list = merge_intervals(f.members.iter().map(Stadium::real_interval).collect());
            acc = Some(match acc {
                None => list,
                Some(prev) => intersect_lists(&prev, &list),
            });
            if acc.as_ref().is_some_and(Vec::is_empty) {
                return Vec::new();
            }
        }
        acc.unwrap_or_default()
    }

    /// Tightest real interval containing the region, or `None` when the
    /// region is empty (a stronger certificate than any interval).
    ///
    /// Every member is convex and symmetric about the real axis, so each
    /// region point projects onto a region point on the axis; the extent
    /// is therefore exact (float rounding aside) and `resolution` only
    /// caps the promised over-approximation, it is not consumed.
    ///
    /// # Panics
    /// If `resolution` is not positive.
    pub fn real_extent(&self, resolution: f64) -> Option<(f64, f64)> {
        assert!(resolution > 0.0, "resolution must be positive");
        if self.families.is_empty() {
            return None;
        }
        let slice = self.real_slice();
        let first = slice.first()?;
        let last = slice.last()?;
        Some((first.0, last.1))
    }

    /// Certified upper bound on `|Im z|` over the region, within
    /// `resolution` of the true value; 0 for an empty region.
    ///
    /// # Panics
    /// If `resolution` is not positive.
    pub fn imag_bound(&self, resolution: f64) -> f64 {
        assert!(resolution > 0.0, "resolution must be positive");
        let Some((xlo, xhi)) = self.real_extent(resolution) else {
            return 0.0;
        };

        // Scan cuts: every member break-abscissa plus a uniform grid. A
        // member's half-height is monotone between its breaks, so on each
        // window its sup sits at a window edge.
        let mut cuts = vec![xlo, xhi];
        for f in &self.families {
            for s in &f.members {
                for x in [
                    s.center_lo - s.radius,
                    s.center_lo,
                    s.center_hi,
                    s.center_hi + s.radius,
                ] {
                    if x > xlo && x < xhi {
                        cuts.push(x);
                    }
                }
            }
        }
        let span = xhi - xlo;
        if span > 0.0 {
            let steps = ((span / resolution).ceil() as usize).clamp(1, 4_000_000);
            for k in 1..steps {
                cuts.push(xlo + span * (k as f64) / (steps as f64));
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        // Exact pointwise values at every cut...
        let mut best = 0.0_f64;
        for &x in &cuts {
            if let Some(v) = self.min_family_height(x, x) {
                best = best.max(v);
            }
        }
        // ...and certified window suprema between them.
        for w in cuts.windows(2) {
            if let Some(v) = self.min_family_height(w[0], w[1]) {
                best = best.max(v);
            }
        }
        best
    }

    /// Min over families of the sup of the family's half-height over
    /// `[x0, x1]`, or `None` if some family has no member spanning the
    /// whole window (the window then lies outside the region, boundary
    /// touching aside).
    fn min_family_height(&self, x0: f64, x1: f64) -> Option<f64> {
        let mut min = f64::INFINITY;
        for f in &self.families {
            let mut sup: Option<f64> = None;
            for s in &f.members {
                if let (Some(h0), Some(h1)) = (s.half_height(x0), s.half_height(x1)) {
                    let v = h0.max(h1);
                    sup = Some(sup.map_or(v, |u: f64| u.max(v)));
                }
            }
            min = min.min(sup?);
        }
        if min.is_finite() {
            Some(min)
        } else {
            None
        }
    }

    /// Oscillation degree `μ̂ = Î / |σ_max|` and the overshoot estimate
    /// `exp(−π/μ̂)`; defined only when the whole region sits strictly in
    /// the open left half-plane.
    ///
    /// # Panics
    /// If `resolution` is not positive.
    pub fn oscillation_estimate(&self, resolution: f64) -> Option<(f64, f64)> {
        let (_, sigma_max) = self.real_extent(resolution)?;
        if sigma_max >= 0.0 {
            return None;
        }
        let im = self.imag_bound(resolution);
        let mu = im / sigma_max.abs();
        let overshoot = if mu == 0.0 {
            0.0
        } else {
            (-std::f64::consts::PI / mu).exp()
        };
        Some((mu, overshoot))
    }
}

/// View parameters for SVG rendering. `None` ranges are derived from the
/// region and overlay with 10% padding.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CanvasSpec {
    pub width: u32,
    pub height: u32,
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
}

impl Default for CanvasSpec {
    fn default() -> Self {
        CanvasSpec { width: 800, height: 600, x_range: None, y_range: None }
    }
}

fn pad_range(lo: f64, hi: f64) -> (f64, f64) {
    let w = (hi - lo).max(1e-9);
    (lo - 0.1 * w, hi + 0.1 * w)
}

/// Renders the region (gray fill, sampled per pixel row as horizontal
/// runs), coordinate axes, and overlay points as circular markers. The
/// output is a standalone SVG 1.1 document.
pub fn render_svg(
    region: &Region,
    overlay: &[(f64, f64)],
    canvas: &CanvasSpec,
) -> Result<String, RegionError> {
    if canvas.width == 0 || canvas.height == 0 {
        return Err(RegionError::ZeroCanvas);
    }
    let (w, h) = (canvas.width as f64, canvas.height as f64);

    // Auto view box: the region's real slice, every family's largest
    // radius as a vertical bound, and all overlay points.
    let ext = region.real_extent(1e-9);
    let mut xs: Vec<f64> = overlay.iter().map(|p| p.0).collect();
    let mut ys: Vec<f64> = overlay.iter().map(|p| p.1).collect();
    if let Some((lo, hi)) = ext {
        xs.push(lo);
        xs.push(hi);
        let y_cap = region
            .families
            .iter()
            .map(|f| f.members.iter().map(|s| s.radius).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        if y_cap.is_finite() {
            ys.push(-y_cap);
            ys.push(y_cap);
        }
    }
    let hull = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() && hi.is_finite() {
            Some((lo, hi))
        } else {
            None
        }
    };
    let (xlo, xhi) = canvas
        .x_range
        .or_else(|| hull(&xs).map(|(a, b)| pad_range(a, b)))
        .unwrap_or((-1.0, 1.0));
    let (ylo, yhi) = canvas
        .y_range
        .or_else(|| hull(&ys).map(|(a, b)| pad_range(a, b)))
        .unwrap_or((-1.0, 1.0));

    let to_px = |x: f64| (x - xlo) / (xhi - xlo) * w;
    let to_py = |y: f64| (yhi - y) / (yhi - ylo) * h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        canvas.width, canvas.height, canvas.width, canvas.height
    ));
    svg.push_str("<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Region fill: per pixel row, merge consecutive member pixels into
    // horizontal run rectangles.
    if !region.families.is_empty() {
        svg.push_str("<g fill=\"#b9b9b9\">\n");
        for py in 0..canvas.height {
            let y = yhi - (py as f64 + 0.5) * (yhi - ylo) / h;
            let mut run_start: Option<u32> = None;
            for px in 0..=canvas.width {
                let inside = px < canvas.width && {
                    let x = xlo + (px as f64 + 0.5) * (xhi - xlo) / w;
                    region.contains(x, y)
                };
                match (inside, run_start) {
                    (true, None) => run_start = Some(px),
                    (false, Some(s)) => {
                        svg.push_str(&format!(
                            "<rect x=\"{s}\" y=\"{py}\" width=\"{}\" height=\"1\"/>\n",
                            px - s
                        ));
                        run_start = None;
                    }
                    _ => {}
                }
            }
        }
        svg.push_str("</g>\n");
    }

    // Axes.
    svg.push_str("<g stroke=\"#333333\" stroke-width=\"1\">\n");
    if ylo <= 0.0 && 0.0 <= yhi {
        let py = to_py(0.0);
        svg.push_str(&format!("<line x1=\"0\" y1=\"{py:.2}\" x2=\"{w}\" y2=\"{py:.2}\"/>\n"));
    }
    if xlo <= 0.0 && 0.0 <= xhi {
        let px = to_px(0.0);
        svg.push_str(&format!("<line x1=\"{px:.2}\" y1=\"0\" x2=\"{px:.2}\" y2=\"{h}\"/>\n"));
    }
    svg.push_str("</g>\n");

    // Overlay markers.
    if !overlay.is_empty() {
        svg.push_str("<g fill=\"#c0392b\">\n");
        for (x, y) in overlay {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\"/>\n",
                to_px(*x),
                to_py(*y)
            ));
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
