pub mod diagram;
pub mod format;
pub mod homology;
pub mod linalg;
pub mod scalar;
pub mod seifert;
pub mod svg;
pub mod weights;
