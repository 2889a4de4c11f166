//! Smoothing kernels supported on `[-1/2, 1/2]`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothingKernel {
    /// `(3/2)(1 - 4x^2)`, the Epanechnikov kernel rescaled to the half-unit support.
    #[default]
    Epanechnikov,
    /// `2(1 - 2|x|)`.
    Triangular,
    /// Indicator of `[-1/2, 1/2]`.
    Uniform,
}

impl SmoothingKernel {
    pub fn name(self) -> &'static str {
        match self {
            SmoothingKernel::Epanechnikov => "epanechnikov",
            SmoothingKernel::Triangular => "triangular",
            SmoothingKernel::Uniform => "uniform",
        }
    }

    /// Kernel value; zero outside `[-1/2, 1/2]`. The uniform kernel is closed
    /// on both ends.
    pub fn eval(self, x: f64) -> f64 {
        if !(-0.5..=0.5).contains(&x) {
            return 0.0;
        }
        match self {
            SmoothingKernel::Epanechnikov => 1.5 * (1.0 - 4.0 * x * x),
            SmoothingKernel::Triangular => 2.0 * (1.0 - 2.0 * x.abs()),
            SmoothingKernel::Uniform => 1.0,
        }
    }

    pub fn peak(self) -> f64 {
        self.eval(0.0)
    }

    /// `int x^2 K(x) dx`.
    pub fn second_moment(self) -> f64 {
        match self {
            SmoothingKernel::Epanechnikov => 1.0 / 20.0,
            SmoothingKernel::Triangular => 1.0 / 24.0,
            SmoothingKernel::Uniform => 1.0 / 12.0,
        }
    }

    /// `int K(x)^2 dx`.
    pub fn l2_squared(self) -> f64 {
        match self {
            SmoothingKernel::Epanechnikov => 1.2,
            SmoothingKernel::Triangular => 4.0 / 3.0,
            SmoothingKernel::Uniform => 1.0,
        }
    }

    /// Total variation of `x -> K(x)` on the real line. Rescaling to
    /// `(1/b) K(./b)` multiplies it by `1/b`.
    pub fn variation(self) -> f64 {
        2.0 * self.peak()
    }

    /// Points where the kernel is not smooth (support ends, and the apex of
    /// the triangular kernel).
    pub fn kinks(self) -> &'static [f64] {
        match self {
            SmoothingKernel::Triangular => &[-0.5, 0.0, 0.5],
            _ => &[-0.5, 0.5],
        }
    }

    /// Fourier transform `int K(x) e^{i w x} dx`; real because `K` is even.
    pub fn fourier(self, w: f64) -> f64 {
        match self {
            SmoothingKernel::Uniform => sinc(0.5 * w),
            SmoothingKernel::Triangular => sinc(0.25 * w).powi(2),
            SmoothingKernel::Epanechnikov => {
                let a = 0.5 * w;
                if a.abs() < 0.05 {
                    // 3 (sin a - a cos a) / a^3 expanded around 0
                    let a2 = a * a;
                    1.0 - a2 / 10.0 + a2 * a2 / 280.0 - a2 * a2 * a2 / 15120.0
                } else {
                    3.0 * (a.sin() - a * a.cos()) / (a * a * a)
                }
            }
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}
