#pragma once

// Seeded semantic bugs for mutation testing of the property suites. The
// regular build has none active. Each mutant is a separate build of the
// library with CERTIVEX_MUTATION set to the bug's number:
//
//   1  symbolic execution emits no range obligation for + - *
//   2  Catch treats a thrown counter of 0 as still escaping
//   3  loop havoc forgets the last assigned variable
//   4  translation gives variables bound outside the innermost
//      declaration an index one too small
//   5  Farkas check accepts non-positive multipliers

#ifndef CERTIVEX_MUTATION
#define CERTIVEX_MUTATION 0
#endif

namespace certivex::mutation {

inline constexpr int kActive = CERTIVEX_MUTATION;

inline constexpr int kDropOverflowCheck = 1;
inline constexpr int kWrongCatchCounter = 2;
inline constexpr int kWrongHavocSet = 3;
inline constexpr int kDeBruijnShift = 4;
inline constexpr int kFarkasSign = 5;

inline constexpr int kCount = 5;

constexpr bool active(int m) { return kActive == m; }

}  // namespace certivex::mutation
