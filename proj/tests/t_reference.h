// Two-sided Student-t tail probabilities computed with 50-digit mpmath.
#ifndef EMBIAS_TESTS_T_REFERENCE_H_
#define EMBIAS_TESTS_T_REFERENCE_H_

namespace tref {

struct Row {
  double dof, t, p;
};

inline constexpr Row kTwoSided[] = {
    {5, 0.5, 0.63829887164092900671},
    {5, 1.0, 0.3632174676491226256},
    {5, 2.0, 0.10193947882985835625},
    {5, 3.0, 0.030099247897462573847},
    {5, 7.406, 0.00070645266824322944236},
    {5, 13.798, 0.00003589945476612071221},
    {5, 0.593, 0.57898438418438637688},
    {64, 0.5, 0.61878993857542141245},
    {64, 1.0, 0.3210764934206100425},
    {64, 2.0, 0.049747891393725307994},
    {64, 3.0, 0.0038439918659207795276},
    {64, 7.406, 3.594297406668152918e-10},
    {64, 13.798, 7.5847201262354720976e-21},
    {64, 0.593, 0.55527091190106170721},
    {621, 0.5, 0.61725219979183178914},
    {621, 1.0, 0.3176999978575360499},
    {621, 2.0, 0.04593530434306677729},
    {621, 3.0, 0.0028079739108698511295},
    {621, 7.406, 4.2623308217435188717e-13},
    {621, 13.798, 5.7249356187216239924e-38},
    {621, 0.593, 0.55339704045584218677},
};

// Upper tail of F(d1, d2).
struct FRow {
  double f, d1, d2, p;
};

inline constexpr FRow kFUpper[] = {
    {54.85, 1, 64, 3.59315182681280041939788806017e-10},
    {190.4, 1, 621, 5.69156942186804590004281706622e-38},
};

}  // namespace tref

#endif  // EMBIAS_TESTS_T_REFERENCE_H_
