//! Color space conversions and the HSV quantizer.

/// Number of quantized HSV colors: 6 hue sectors × 3 saturation × 2 value.
pub const HSV_BINS: usize = 36;

const HUE_SECTORS: usize = 6;
const SAT_LEVELS: usize = 3;
const VAL_LEVELS: usize = 2;

/// Hexcone HSV: hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
/// Grays get hue 0.
pub fn rgb_to_hsv([r, g, b]: [u8; 3]) -> (f64, f64, f64) {
    let (r, g, b) = (r as f64 / 255.0, g as f64 / 255.0, b as f64 / 255.0);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let v = max;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    if delta == 0.0 {
        return (0.0, s, v);
    }
    let h = if max == r {
        60.0 * ((g - b) / delta)
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    let h = if h < 0.0 { h + 360.0 } else { h };
    (if h >= 360.0 { h - 360.0 } else { h }, s, v)
}

/// Quantized HSV color index in `0..36`, laid out `(hue·3 + sat)·2 + val`.
pub fn hsv_bin(pixel: [u8; 3]) -> usize {
    let (h, s, v) = rgb_to_hsv(pixel);
    let hue = ((h / 60.0) as usize).min(HUE_SECTORS - 1);
    let sat = ((s * SAT_LEVELS as f64) as usize).min(SAT_LEVELS - 1);
    let val = ((v * VAL_LEVELS as f64) as usize).min(VAL_LEVELS - 1);
    (hue * SAT_LEVELS + sat) * VAL_LEVELS + val
}

// sRGB primaries to XYZ, D65.
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

fn srgb_to_linear(c: u8) -> f64 {
    let c = c as f64 / 255.0;
    if c <= 0.04045 {
        c / 12.92
    } else {
        libm::pow((c + 0.055) / 1.055, 2.4)
    }
}

fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        libm::cbrt(t)
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

/// CIE L*a*b* via linear sRGB and XYZ. The white point is the XYZ image of
/// sRGB white under the matrix above (D65), so every gray has `a = b = 0`.
pub fn rgb_to_lab([r, g, b]: [u8; 3]) -> (f64, f64, f64) {
    let lin = [srgb_to_linear(r), srgb_to_linear(g), srgb_to_linear(b)];
    let mut xyz = [0.0; 3];
    let mut white = [0.0; 3];
    for (k, row) in RGB_TO_XYZ.iter().enumerate() {
        xyz[k] = row[0] * lin[0] + row[1] * lin[1] + row[2] * lin[2];
        white[k] = row[0] + row[1] + row[2];
    }
    let fx = lab_f(xyz[0] / white[0]);
    let fy = lab_f(xyz[1] / white[1]);
    let fz = lab_f(xyz[2] / white[2]);
    (116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))
}
