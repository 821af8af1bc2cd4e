//! Small numerical utilities shared by the solver modules: dense complex
//! polynomials, factored-denominator rational functions, root finding,
//! nullspace extraction, Gauss–Legendre quadrature and barycentric rational
//! fitting.

pub mod aaa;
pub mod linalg;
pub mod poly;
pub mod quadrature;
pub mod rational;
pub mod roots;

pub use poly::Poly;
pub use rational::Rational;
