//! CSV dumps and |u| heatmaps.

use std::path::Path;

use anyhow::{Context, Result};
use image::{Rgb, RgbImage};

use ptds::{Flag, Sample64};

pub const HEADER: [&str; 8] = ["x", "y", "re_u", "im_u", "abs_u", "re_w", "im_w", "flag"];

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes one row per node, `y` outer and `x` inner. Absent `w` leaves its
/// columns empty; singular nodes carry NaN fields.
pub fn write_csv(path: &Path, xs: &[f64], ys: &[f64], samples: &[Sample64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(HEADER)?;
    let nx = xs.len();
    for (k, s) in samples.iter().enumerate() {
        let (re_w, im_w) = s.w.map_or((String::new(), String::new()), |w| (fmt17(w.re), fmt17(w.im)));
        w.write_record([
            fmt17(xs[k % nx]),
            fmt17(ys[k / nx]),
            fmt17(s.u.re),
            fmt17(s.u.im),
            fmt17(s.u.norm()),
            re_w,
            im_w,
            s.flag.code().to_string(),
        ])?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

const SINGULAR: Rgb<u8> = Rgb([255, 0, 255]);

// viridis at five stops
const STOPS: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

fn colour(v: f64) -> Rgb<u8> {
    let s = v.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let k = (s.floor() as usize).min(STOPS.len() - 2);
    let a = s - k as f64;
    let mix = |c: usize| (STOPS[k][c] * (1.0 - a) + STOPS[k + 1][c] * a).round() as u8;
    Rgb([mix(0), mix(1), mix(2)])
}

/// Heatmap of |u| clipped to `[0, clip]`, one pixel per node with `y`
/// increasing upwards; singular nodes are magenta.
pub fn write_png(path: &Path, nx: usize, ny: usize, samples: &[Sample64], clip: f64) -> Result<()> {
    let mut img = RgbImage::new(nx as u32, ny as u32);
    for (k, s) in samples.iter().enumerate() {
        let (i, j) = (k % nx, k / nx);
        let a = s.u.norm();
        let px = if s.flag == Flag::Singular || !a.is_finite() { SINGULAR } else { colour(a / clip) };
        img.put_pixel(i as u32, (ny - 1 - j) as u32, px);
    }
    img.save(path).with_context(|| format!("writing {}", path.display()))
}

/// File stem for time `t`: `t=-0.5` becomes `t_-0.5`.
pub fn time_stem(t: f64) -> String {
    format!("t_{t}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_text() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt17(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn colour_scale_ends() {
        assert_eq!(colour(0.0), Rgb([68, 1, 84]));
        assert_eq!(colour(2.0), Rgb([253, 231, 37]));
    }
}
