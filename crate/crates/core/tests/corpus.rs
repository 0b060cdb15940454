mod common;

use common::*;
use ttseifert::scalar::ScalarContext;
use ttseifert::seifert::{self, SeifertConfig};

#[test]
fn corpus_diagrams_are_valid_and_run() {
    let ctx = ScalarContext::rational();
    let mut crossings = 0;
    let mut switches = 0;
    for s in corpus(200, 1000, false) {
        assert!(s.diagram.is_valid());
        crossings += s.diagram.crossings.len();
        switches += s.diagram.switches.len();
        if let Err(e) = seifert::run(&s.diagram, &s.weights, &ctx, &SeifertConfig::default()) {
            panic!(
                "seed {}: {e}\n{}",
                s.seed,
                ttseifert::format::write_diagram(&s.diagram, None)
            );
        }
    }
    assert!(crossings > 200 && switches > 200, "{crossings} {switches}");
}
