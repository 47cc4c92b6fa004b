//! Component-vector newtypes over [`Scalar`](crate::Scalar).

/// Defines a newtype around `Vec<Scalar>` with module operations.
macro_rules! frame_vector {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, Hash, Default)]
        pub struct $name(pub Vec<$crate::Scalar>);

        impl $name {
            pub fn new(components: Vec<$crate::Scalar>) -> Self {
                $name(components)
            }

            pub fn zero(len: usize) -> Self {
                $name(vec![$crate::Scalar::zero(); len])
            }

            /// The `i`-th frame element (0-based).
            pub fn basis(len: usize, i: usize) -> Self {
                let mut v = Self::zero(len);
                v.0[i] = $crate::Scalar::one();
                v
            }

            pub fn components(&self) -> &[$crate::Scalar] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|c| c.is_zero())
            }

            pub fn add(&self, other: &Self) -> Self {
                debug_assert_eq!(self.len(), other.len());
                $name(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
            }

            pub fn sub(&self, other: &Self) -> Self {
                debug_assert_eq!(self.len(), other.len());
                $name(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
            }

            pub fn neg(&self) -> Self {
                $name(self.0.iter().map(|a| -a).collect())
            }

            pub fn scale(&self, f: &$crate::Scalar) -> Self {
                if f.is_one() {
                    return self.clone();
                }
                $name(self.0.iter().map(|a| a * f).collect())
            }

            /// `self += f * other`.
            pub fn add_scaled(&mut self, f: &$crate::Scalar, other: &Self) {
                if f.is_zero() {
                    return;
                }
                for (a, b) in self.0.iter_mut().zip(&other.0) {
                    if !b.is_zero() {
                        *a = &*a + &(f * b);
                    }
                }
            }
        }

        impl std::ops::Index<usize> for $name {
            type Output = $crate::Scalar;
            fn index(&self, i: usize) -> &$crate::Scalar {
                &self.0[i]
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                write!(f, "(")?;
                for (i, c) in self.0.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }

        impl std::fmt::Debug for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                write!(f, "{}{}", stringify!($name), self)
            }
        }

        impl $crate::report::IsZero for $name {
            fn is_zero_value(&self) -> bool {
                self.is_zero()
            }
        }
    };
}

pub(crate) use frame_vector;
