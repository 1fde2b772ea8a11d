// Builds the equality test, flattens it, finds a witness, and checks the
// gadget and an unchecked bit decomposition against their specifications.

#include <iostream>

#include "pfkit/pfkit.hpp"

using namespace pfkit;

int main() {
    Prime p(7);
    auto eq = gadgets::equality_test();
    std::cout << pfcs::print_system(eq.defs) << "\n";

    FlattenResult flat = flatten(eq.defs, eq.top, p);
    std::cout << "flattened over F_7:\n" << json_io::export_r1cs(flat.system) << "\n";

    auto outcome = pfcs::sat_search(eq.defs, eq.top, {FieldElement(3, p), FieldElement(5, p), FieldElement(0, p)}, p);
    if (outcome.is_satisfied()) {
        std::cout << "equality_test(3, 5, 0) holds with witness "
                  << json_io::export_witness(witness_of(eq.defs, outcome.witness()));
    }

    verify::VerifyOptions opts;
    opts.determinism = true;
    auto verdict = verify::verify(eq, p, verify::spec_for(eq), opts);
    std::cout << "equality_test at p = 7: " << json_io::verdict_to_json(verdict).dump() << "\n";

    auto bits = gadgets::bits_to_field_unchecked(3);
    auto det = verify::check_deterministic(bits, p, {"f"});
    std::cout << "bits_to_field_unchecked_3 at p = 7: " << json_io::verdict_to_json(det).dump() << "\n";
    return 0;
}
