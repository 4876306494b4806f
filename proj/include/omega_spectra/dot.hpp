#pragma once

#include <sstream>
#include <string>

#include "presentation.hpp"

namespace omega_spectra {

struct DotOptions {
  std::string name = "A";
  std::size_t max_nodes = 2000;  // longer presentations are cut to their first max_nodes positions
};

/// Graphviz rendering: the order as a left-to-right chain of elements and f as
/// labelled arcs leaving and entering through the top of each node.
inline std::string to_dot(const FinitePresentation& p, const DotOptions& opt = {}) {
  const std::size_t n = std::min(p.size(), opt.max_nodes);
  std::ostringstream o;
  o << "digraph \"" << opt.name << "\" {\n";
  o << "  rankdir=LR;\n  nodesep=0.2;\n  node [shape=circle, fontsize=10, width=0.3, fixedsize=false];\n";
  if (n < p.size()) o << "  // first " << n << " of " << p.size() << " positions\n";
  for (std::size_t i = 0; i < n; ++i) o << "  p" << i << " [label=\"" << p.element(i) << "\"];\n";
  if (n > 1) {
    o << "  ";
    for (std::size_t i = 0; i < n; ++i) o << (i ? " -> " : "") << "p" << i;
    o << " [arrowhead=none, color=gray50, weight=100];\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& im = p.image()[i];
    if (!im || *im >= n) continue;
    o << "  p" << i << ":n -> p" << *im << ":n [label=\"f\", color=blue, fontcolor=blue, constraint=false];\n";
  }
  o << "}\n";
  return o.str();
}

}  // namespace omega_spectra
