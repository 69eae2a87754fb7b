//! Floating-point abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type the analysis is carried out in (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts to any float type")
    }

    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize converts to any float type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Default
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Neumaier-compensated accumulator for complex sums.
///
/// Terms must be fed in a fixed order for results to be bit-stable.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    re: (T, T),
    im: (T, T),
}

fn neumaier_add<T: Real>(acc: &mut (T, T), x: T) {
    let (sum, comp) = *acc;
    let t = sum + x;
    let c = if sum.abs() >= x.abs() {
        (sum - t) + x
    } else {
        (x - t) + sum
    };
    *acc = (t, comp + c);
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            re: (T::zero(), T::zero()),
            im: (T::zero(), T::zero()),
        }
    }

    pub fn add(&mut self, z: Complex<T>) {
        neumaier_add(&mut self.re, z.re);
        neumaier_add(&mut self.im, z.im);
    }

    pub fn total(&self) -> Complex<T> {
        Complex::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// Compensated sum of a complex sequence, in iteration order.
pub fn csum<T: Real, I: IntoIterator<Item = Complex<T>>>(terms: I) -> Complex<T> {
    let mut acc = CompensatedSum::new();
    for z in terms {
        acc.add(z);
    }
    acc.total()
}

/// Compensated sum of a real sequence, in iteration order.
pub fn rsum<T: Real, I: IntoIterator<Item = T>>(terms: I) -> T {
    let mut acc = (T::zero(), T::zero());
    for x in terms {
        neumaier_add(&mut acc, x);
    }
    acc.0 + acc.1
}
