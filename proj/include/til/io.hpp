#pragma once

#include "til/common.hpp"
#include "til/dobrushin.hpp"
#include "til/glauber.hpp"
#include "til/tensor.hpp"
#include "til/tsl.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace til {

using Json = nlohmann::json;

// {"n", "entries": [{"idx": [i,j,k,l], "val"}], "symmetrize", "diagonal_zero"}, 1-based indices.
// symmetrize=true: entries are summed into a raw array which is then averaged over permutations.
// symmetrize=false: each entry sets its whole permutation orbit; conflicting repeats are rejected.
SymTensor4 tensor_from_json(const Json& j);
Json tensor_to_json(const SymTensor4& T, double drop_below = 0.0);

struct Potential {
  int n = 0;
  std::string kind;  // tensor | table | curie_weiss | zero
  Vec table;
  std::optional<SymTensor4> tensor;
};

// {"type": "tensor", ...tensor fields} (default when "type" is absent)
// {"type": "table", "n", "values": [2^n numbers]}
// {"type": "curie_weiss", "n", "beta", "p"}
// {"type": "zero", "n"}
Potential potential_from_json(const Json& j);

Json read_json_file(const std::string& path);

// magnetization | coord:i | pair:i:j | random:seed
Vec parse_test_function(const std::string& spec, int n);

Json to_json(const SpectralReport& r);
Json to_json(const Certificate& c);
Json to_json(const DecompositionComponent& c);

}  // namespace til
