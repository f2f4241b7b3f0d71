//! Directions of arrival, their Cartesian view, and the equirectangular
//! pixel projection shared by the audio, video and label code.
//!
//! Angles are stored in degrees. Azimuth grows counterclockwise seen from
//! above (towards the left of a 360° frame), elevation grows upwards.

use crate::error::{Error, Result};
use crate::scalar::{sin_cos_deg, Scalar};

/// Wraps an azimuth in degrees into `[-180, 180)`.
pub fn wrap_azimuth<T: Scalar>(azimuth: T) -> T {
    let full = T::lit(360.0);
    let half = T::lit(180.0);
    if azimuth >= -half && azimuth < half {
        return azimuth;
    }
    let mut a = (azimuth + half) % full;
    if a < T::zero() {
        a += full;
    }
    let mut a = a - half;
    // rounding in the shift can land exactly on +180
    if a >= half {
        a -= full;
    }
    a
}

/// Direction of arrival in degrees.
///
/// Azimuth is always held in `[-180, 180)` and elevation in `[-90, 90]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Doa<T> {
    azimuth: T,
    elevation: T,
}

impl<T: Scalar> Doa<T> {
    /// Builds a direction, wrapping the azimuth. Fails on non-finite input
    /// or an elevation outside `[-90, 90]`.
    pub fn new(azimuth: T, elevation: T) -> Result<Self> {
        let ninety = T::lit(90.0);
        if !azimuth.is_finite() || !elevation.is_finite() || elevation.abs() > ninety {
            return Err(Error::InvalidDoa {
                azimuth: azimuth.as_f64(),
                elevation: elevation.as_f64(),
            });
        }
        Ok(Self {
            azimuth: wrap_azimuth(azimuth),
            elevation,
        })
    }

    /// Internal constructor for values already known to satisfy the
    /// elevation bound.
    pub(crate) fn from_valid(azimuth: T, elevation: T) -> Self {
        debug_assert!(elevation.abs() <= T::lit(90.0));
        Self {
            azimuth: wrap_azimuth(azimuth),
            elevation,
        }
    }

    pub fn azimuth(&self) -> T {
        self.azimuth
    }

    pub fn elevation(&self) -> T {
        self.elevation
    }

    /// Unit vector `(cos az cos el, sin az cos el, sin el)`.
    pub fn to_unit_vec(&self) -> Vec3<T> {
        let (sa, ca) = sin_cos_deg(self.azimuth);
        let (se, ce) = sin_cos_deg(self.elevation);
        Vec3::new(ca * ce, sa * ce, se)
    }

    /// Direction of a non-zero vector. At the poles the azimuth is set to 0.
    pub fn from_vec(v: Vec3<T>) -> Result<Self> {
        if v.norm() <= T::lit(1e-12) {
            return Err(Error::ZeroVector);
        }
        let horizontal = v.x.hypot(v.y);
        let elevation = v.z.atan2(horizontal).to_degrees();
        let ninety = T::lit(90.0);
        let elevation = elevation.max(-ninety).min(ninety);
        let azimuth = if elevation.abs() >= ninety {
            T::zero()
        } else {
            v.y.atan2(v.x).to_degrees()
        };
        Ok(Self::from_valid(azimuth, elevation))
    }

    /// Great-circle angle to `other` in degrees, in `[0, 180]`.
    pub fn angular_distance(&self, other: &Self) -> T {
        self.to_unit_vec().angle_to(&other.to_unit_vec())
    }

    /// Converts to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Doa<U> {
        Doa {
            azimuth: U::lit(self.azimuth.as_f64()),
            elevation: U::lit(self.elevation.as_f64()),
        }
    }
}

/// Free-function form of [`Doa::to_unit_vec`].
pub fn doa_to_unit_vec<T: Scalar>(d: Doa<T>) -> Vec3<T> {
    d.to_unit_vec()
}

/// Free-function form of [`Doa::from_vec`].
pub fn unit_vec_to_doa<T: Scalar>(v: Vec3<T>) -> Result<Doa<T>> {
    Doa::from_vec(v)
}

/// Free-function form of [`Doa::angular_distance`].
pub fn angular_distance<T: Scalar>(a: Doa<T>, b: Doa<T>) -> T {
    a.angular_distance(&b)
}

/// Cartesian direction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn dot(&self, o: &Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    /// Angle between two non-zero vectors in degrees. Uses `atan2` of the
    /// cross and dot products, which stays accurate near 0° and 180°.
    pub fn angle_to(&self, o: &Self) -> T {
        self.cross(o).norm().atan2(self.dot(o)).to_degrees()
    }
}

/// Pixel size of an equirectangular full-sphere frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FrameGeometry {
    width: usize,
    height: usize,
}

impl Default for FrameGeometry {
    fn default() -> Self {
        Self {
            width: 1920,
            height: 960,
        }
    }
}

impl FrameGeometry {
    /// `width` must equal `2 * height`, and be a multiple of 4 so a quarter
    /// turn is a whole number of columns.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if height == 0 || width != 2 * height || !width.is_multiple_of(4) {
            return Err(Error::GeometryMismatch(format!(
                "{width}x{height} is not a 2:1 equirectangular frame with width divisible by 4"
            )));
        }
        Ok(Self { width, height })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Columns spanned by a 90° azimuth rotation.
    pub fn quarter_turn_columns(&self) -> usize {
        self.width / 4
    }

    /// Pixel `(column, row)` of a direction.
    ///
    /// Column `floor((0.5 - az/360) * width)` modulo `width`, so azimuth 0 is
    /// the frame centre and positive azimuth moves left. Rows sample the
    /// meridian at `90 - row * 180/height` degrees: the nearest row is
    /// `height/2 - round(el * height / 180)` taken modulo `height`, which
    /// puts the zenith on row 0 and makes the elevation flip the row
    /// permutation `r -> (height - r) mod height`. Both poles share row 0.
    pub fn project<T: Scalar>(&self, d: &Doa<T>) -> (usize, usize) {
        let w = self.width as f64;
        let h = self.height as i64;
        let az = d.azimuth().as_f64();
        let el = d.elevation().as_f64();
        let col = (w * 0.5 - az * w / 360.0).floor() as i64;
        let col = col.rem_euclid(self.width as i64) as usize;
        let offset = (el * h as f64 / 180.0).round() as i64;
        let row = (h / 2 - offset).rem_euclid(h) as usize;
        (col, row)
    }
}

/// Free-function form of [`FrameGeometry::project`].
pub fn project_equirect<T: Scalar>(d: Doa<T>, g: FrameGeometry) -> (usize, usize) {
    g.project(&d)
}
