// Shared rule plumbing for the embedding and composition classifiers: the
// first rule to reach a verdict wins, yes verdicts flow down the implication
// chain Schatten => compact => bounded, and no verdicts flow up its
// contrapositive.
#pragma once

#include <string>

#include "muntz/embedding.hpp"

namespace muntz::embedding {

class VerdictChain {
 public:
  explicit VerdictChain(ClassificationReport& r) : r_(r) {}

  void yes_bounded(const std::string& rule) { say(r_.bounded, Verdict::Yes, rule); }
  void yes_compact(const std::string& rule) {
    say(r_.compact, Verdict::Yes, rule);
    yes_bounded("implied: compact operators are bounded (" + rule + ")");
  }
  void yes_schatten(const std::string& rule) {
    say(r_.schatten_all_q, Verdict::Yes, rule);
    yes_compact("implied: Schatten-class operators are compact (" + rule + ")");
  }
  void no_compact(const std::string& rule) {
    say(r_.compact, Verdict::No, rule);
    say(r_.schatten_all_q, Verdict::No,
        "implied: Schatten classes contain only compact operators (" + rule +
            ")");
  }
  void no_bounded(const std::string& rule) {
    say(r_.bounded, Verdict::No, rule);
    no_compact("implied: unbounded operators are not compact (" + rule + ")");
  }

 private:
  static void say(RuledVerdict& v, Verdict val, const std::string& rule) {
    if (v.value == Verdict::Inconclusive) {
      v.value = val;
      v.rule = rule;
    }
  }

  ClassificationReport& r_;
};

}  // namespace muntz::embedding
