//! Two-row rasters of a point cloud: window `a` on top, window `b` below.

use std::path::Path;

use crate::error::Result;
use crate::subst::Letter;

use super::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderStyle {
    pub background: [u8; 3],
    pub colors: [[u8; 3]; 2],
    /// Blank pixel rows between the two bands.
    pub separator: u32,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            background: [255, 255, 255],
            colors: [[31, 78, 180], [200, 40, 40]],
            separator: 2,
        }
    }
}

/// Horizontal extent shared by both rows.
fn extent(cloud: &PointCloud) -> Option<(f64, f64)> {
    let mut it = cloud.points.iter().flatten().copied();
    let first = it.next()?;
    let (lo, hi) = it.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x)));
    Some((lo, hi))
}

/// Occupied columns per window for a raster `width` pixels wide.
pub fn occupied_columns(cloud: &PointCloud, width: u32) -> [Vec<bool>; 2] {
    let w = width as usize;
    let mut cols = [vec![false; w], vec![false; w]];
    let Some((lo, hi)) = extent(cloud) else {
        return cols;
    };
    if w == 0 {
        return cols;
    }
    let span = if hi > lo { hi - lo } else { 1.0 };
    for l in Letter::ALL {
        for &x in cloud.get(l) {
            let c = (((x - lo) / span) * w as f64).floor() as usize;
            cols[l.index()][c.min(w - 1)] = true;
        }
    }
    cols
}

/// Binary PPM (P6).
pub fn render_ppm(cloud: &PointCloud, width: u32, height: u32, style: &RenderStyle) -> Vec<u8> {
    let cols = occupied_columns(cloud, width);
    let sep = style.separator.min(height);
    let band = (height - sep) / 2;
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.reserve(3 * width as usize * height as usize);
    for row in 0..height {
        let window = if row < band {
            Some(0)
        } else if row >= band + sep && row < 2 * band + sep {
            Some(1)
        } else {
            None
        };
        for c in 0..width as usize {
            let px = match window {
                Some(k) if cols[k][c] => style.colors[k],
                _ => style.background,
            };
            out.extend_from_slice(&px);
        }
    }
    out
}

/// SVG with one rect per run of occupied columns.
pub fn render_svg(cloud: &PointCloud, width: u32, height: u32, style: &RenderStyle) -> String {
    let cols = occupied_columns(cloud, width);
    let sep = style.separator.min(height);
    let band = (height - sep) / 2;
    let hex = |c: [u8; 3]| format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2]);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" shape-rendering=\"crispEdges\">\n<rect width=\"{width}\" height=\"{height}\" fill=\"{}\"/>\n",
        hex(style.background)
    );
    for (k, row) in cols.iter().enumerate() {
        let y = if k == 0 { 0 } else { band + sep };
        let mut c = 0;
        while c < row.len() {
            if !row[c] {
                c += 1;
                continue;
            }
            let start = c;
            while c < row.len() && row[c] {
                c += 1;
            }
            out.push_str(&format!(
                "<rect x=\"{start}\" y=\"{y}\" width=\"{}\" height=\"{band}\" fill=\"{}\"/>\n",
                c - start,
                hex(style.colors[k])
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Writes SVG when the path ends in `.svg`, PPM otherwise.
pub fn render(cloud: &PointCloud, path: &Path, width: u32, height: u32, style: &RenderStyle) -> Result<()> {
    let is_svg = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("svg"));
    if is_svg {
        std::fs::write(path, render_svg(cloud, width, height, style))?;
    } else {
        std::fs::write(path, render_ppm(cloud, width, height, style))?;
    }
    Ok(())
}
