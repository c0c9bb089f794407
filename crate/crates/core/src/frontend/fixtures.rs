//! Reference instances in document form.

/// B = ℚ[x] with |x| = 2; ∂e1 = e0·x.
pub const K1: &str = "\
field Q
algebra A
algebra B extends A
  gen x deg 2 d 0

module N over B
  basis e0 deg 0
  basis e1 deg 3
  d e1 = e0*x
";

/// A = ℚ⟨y⟩, B = A[x] with dx = y; ∂e1 = e0·x·y.
pub const K2: &str = "\
field Q
algebra A
  gen y deg 1 d 0
algebra B extends A
  gen x deg 2 d y

module N over B
  basis e0 deg 0
  basis e1 deg 4
  d e1 = e0*x*y
";

/// A = ℚ[z], B = A[x]; N is extended from A.
pub const BASE_CHANGE: &str = "\
field Q
algebra A
  gen z deg 2 d 0
algebra B extends A
  gen x deg 2 d 0

module N over A
  basis e0 deg 0
  basis e1 deg 3
  d e1 = e0*z
";

/// B = ℚ[x1, x2] with |x1| = 1, |x2| = 2, dx2 = x1.
pub const X1X2: &str = "\
field Q
algebra A
algebra B extends A
  gen x1 deg 1 d 0
  gen x2 deg 2 d x1

module N over B
  basis e0 deg 0
  basis e1 deg 2
  d e1 = e0*x1

derivation D deg -2
  image x2 = 1
";

/// A free module over a two-generator extension.
pub const FREE: &str = "\
field Q
algebra A
  gen y deg 1 d 0
algebra B extends A
  gen x deg 2 d y
  gen w deg 3 d 0

module F over B
  basis e0 deg 0
  basis e1 deg 2
  basis e2 deg 3
";

pub fn all() -> [(&'static str, &'static str); 5] {
    [
        ("K1", K1),
        ("K2", K2),
        ("base-change", BASE_CHANGE),
        ("x1x2", X1X2),
        ("free", FREE),
    ]
}
