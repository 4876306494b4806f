#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "block.hpp"
#include "error.hpp"

namespace omega_spectra {

/// A finite stage A_s of a computable copy of (ω,<): distinct naturals listed in
/// ≺-order, with f_{A_s} stored positionally (image[i] is the position of
/// f_{A_s}(a_i), or empty when not committed).
class FinitePresentation {
 public:
  FinitePresentation() = default;

  FinitePresentation(std::vector<Nat> elements, std::vector<std::optional<std::size_t>> image, Nat stage = 0)
      : elements_(std::move(elements)), image_(std::move(image)), stage_(stage) {
    if (image_.size() != elements_.size()) fail(ErrorKind::InputError, "presentation: image/element size mismatch");
    index();
    for (auto& im : image_)
      if (im && *im >= elements_.size()) fail(ErrorKind::InputError, "presentation: image position out of range");
  }

  /// f_{A}(a_i) = a_{f(i)} for every position whose image falls inside the presentation.
  static FinitePresentation induced(std::vector<Nat> elements, const std::vector<Nat>& source, Nat stage = 0) {
    std::vector<std::optional<std::size_t>> image(elements.size());
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if (i >= source.size()) fail(ErrorKind::SearchBudgetExceeded, "presentation extends past the tabulated source");
      if (source[i] < elements.size()) image[i] = static_cast<std::size_t>(source[i]);
    }
    return FinitePresentation(std::move(elements), std::move(image), stage);
  }

  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  Nat stage() const { return stage_; }
  void set_stage(Nat s) { stage_ = s; }
  const std::vector<Nat>& elements() const { return elements_; }
  const std::vector<std::optional<std::size_t>>& image() const { return image_; }
  Nat element(std::size_t i) const { return elements_.at(i); }

  bool contains(Nat x) const { return pos_.count(x) != 0; }
  std::size_t position(Nat x) const {
    auto it = pos_.find(x);
    if (it == pos_.end()) fail(ErrorKind::InputError, "element " + std::to_string(x) + " not in presentation");
    return it->second;
  }

  std::optional<Nat> f_value(Nat x) const {
    auto im = image_[position(x)];
    if (!im) return std::nullopt;
    return elements_[*im];
  }

  /// Block of position i under the positional function (all images must be committed).
  FBlock block_at(std::size_t i) const {
    std::vector<Nat> vals(elements_.size());
    for (std::size_t k = 0; k < elements_.size(); ++k) {
      if (!image_[k]) fail(ErrorKind::NotClosedWithinBound, "uncommitted value at position " + std::to_string(k));
      vals[k] = *image_[k];
    }
    // The presentation is complete, so a block touching the last position is still a block.
    vals.push_back(vals.size());
    return BlockScanner(std::move(vals)).block_of(i);
  }

  bool operator==(const FinitePresentation& o) const { return elements_ == o.elements_ && image_ == o.image_; }

  /// True iff `earlier` lists a subsequence of this presentation in the same relative order.
  bool extends_in_order(const FinitePresentation& earlier) const {
    std::size_t last = 0;
    bool first = true;
    for (Nat x : earlier.elements_) {
      auto it = pos_.find(x);
      if (it == pos_.end()) return false;
      if (!first && it->second <= last) return false;
      last = it->second;
      first = false;
    }
    return true;
  }

 private:
  std::vector<Nat> elements_;
  std::vector<std::optional<std::size_t>> image_;
  std::unordered_map<Nat, std::size_t> pos_;
  Nat stage_ = 0;

  void index() {
    pos_.reserve(elements_.size());
    for (std::size_t i = 0; i < elements_.size(); ++i)
      if (!pos_.emplace(elements_[i], i).second)
        fail(ErrorKind::InputError, "presentation lists " + std::to_string(elements_[i]) + " twice");
  }
};

}  // namespace omega_spectra
