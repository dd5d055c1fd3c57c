#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
Published reduction counts (N, n, K, k) for well known networks, as obtained
with the `@drivers-split` initial partition and maximum matching drivers.

Dataset versions drift, so a mismatch is only a warning.
"""

import logging
from typing import Dict, NamedTuple, Optional

logger = logging.getLogger(__name__)


class Counts(NamedTuple):
    N: int
    n: int
    K: int
    k: int


PUBLISHED: Dict[str, Counts] = {
    # electronic circuits
    "s208st": Counts(123, 105, 29, 15),
    "s420st": Counts(253, 214, 59, 29),
    "s838st": Counts(513, 438, 119, 60),
    # food webs
    "seagrass": Counts(50, 43, 13, 8),
    "grassland": Counts(89, 31, 46, 10),
    "ythan": Counts(136, 89, 69, 24),
    "littlerock": Counts(184, 54, 99, 4),
    # protein interaction
    "maayan-faa": Counts(1227, 1027, 363, 215),
    "maayan-Stelzl": Counts(1707, 1276, 765, 420),
    # transportation and infrastructure
    "opsahl-open-flights": Counts(2940, 2422, 872, 469),
    "US-powergrid-4941": Counts(4942, 4688, 575, 445),
    "tntp-Chicago-Regional": Counts(12980, 12969, 215, 215),
    # peer to peer
    "p2p-Gnutella08": Counts(6302, 5273, 4106, 3116),
    "p2p-Gnutella06": Counts(8718, 7737, 5033, 4085),
    "p2p-Gnutella05": Counts(8847, 7800, 5111, 4115),
    "p2p-Gnutella04": Counts(10877, 9872, 6004, 5024),
    "p2p-Gnutella-24A": Counts(26519, 20273, 18965, 12875),
    # organizational and social
    "Consulting": Counts(47, 47, 2, 2),
    "Manufacturing": Counts(78, 74, 1, 1),
    "moreno-innovation": Counts(242, 214, 29, 7),
    "CSphdA": Counts(1883, 241, 1176, 91),
    "ego-twitter": Counts(23371, 2692, 22432, 2202),
    "ego-gplus": Counts(23629, 2438, 23497, 2339),
    "Epinions": Counts(75880, 37651, 41627, 7450),
    "Slashdot": Counts(82169, 65436, 3737, 3680),
    "libre-film-trust": Counts(875, 425, 359, 93),
    "WikiVote": Counts(7116, 2321, 4736, 3),
    "librec-ciao-dvd": Counts(4659, 3059, 3247, 1748),
    "ownership": Counts(7254, 360, 5950, 152),
    # neuronal
    "rhesusbrain1": Counts(243, 229, 242, 228),
    "celegans-neuronal": Counts(298, 264, 49, 17),
    # gene regulation
    "coliInter-NoAutoReg": Counts(420, 40, 314, 2),
    "coliInter-full": Counts(425, 49, 309, 2),
    "TRNYeast2-Costanzo": Counts(689, 92, 565, 43),
    "TRNYeast1-Balaji": Counts(4441, 1983, 4282, 1829),
    "yeast2017-full": Counts(6854, 6645, 6648, 6439),
    "yeast2019-full": Counts(6887, 6705, 6670, 6488),
    # citation and web
    "Kohonen": Counts(3773, 2652, 2114, 1123),
    "subelj_cora": Counts(23167, 9254, 10210, 281),
    "CitHepTh": Counts(27771, 19764, 5994, 650),
    "CitHepPh": Counts(34547, 24936, 8030, 802),
    "linux": Counts(30838, 3767, 20049, 260),
    "moreno_blogs": Counts(1225, 889, 436, 123),
    "dimacs10_polblogs": Counts(1225, 1177, 126, 81),
    "wikipedia_link_gag": Counts(2930, 1097, 1185, 52),
    "EPAA": Counts(4272, 680, 3285, 161),
    "wikipedia_link_csb": Counts(5562, 2274, 2971, 233),
    "CaliforniaA": Counts(6176, 1045, 4489, 96),
    "wikipedia_link_mi": Counts(7997, 2185, 4825, 153),
    "wbcsstanfordA": Counts(9436, 5326, 3653, 794),
    "cfinder_google": Counts(15764, 8678, 5313, 1487),
    "wikipedia_link_bat_smg": Counts(21901, 6845, 14047, 891),
}


def lookup(name: str) -> Optional[Counts]:
    return PUBLISHED.get(name)


def check_row(name: str, N: int, n: int, K: int, k: int) -> Optional[bool]:
    """
    True when the counts match the published ones, False (and a warning) when
    they differ, None for networks we have no reference for.
    """
    expected = PUBLISHED.get(name)
    if expected is None:
        return None
    got = Counts(N, n, K, k)
    if got == expected:
        return True
    logger.warning(
        "reference mismatch: name=%s got=%s expected=%s",
        name,
        "/".join(map(str, got)),
        "/".join(map(str, expected)),
    )
    return False
