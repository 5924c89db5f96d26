import pytest

from cudfsolve import DocIndex, parse_document

# A small upgrade scenario exercising most of the format: multiple
# versions, a virtual feature, chained conflicts, a recommendation,
# and a request that both installs and upgrades.  Three packages are
# installed; upgrading `conf` past version 1 forces its old version
# out, and `inst` can only reach version 3 by trading `conf` for the
# `feat` provider.
UPGRADE_SCENARIO = """\
package: inst
version: 3
conflicts: conf < 3

package: inst
version: 2
depends: dep < 2

package: inst
version: 1
depends: dep

package: conf
version: 2

package: conf
version: 1
installed: true

package: feat
version: 1
provides: conf = 3

package: dep
version: 3
conflicts: dep
recommends: recomm

package: dep
version: 2
conflicts: dep < 2

package: dep
version: 1
installed: true

package: recomm
version: 1
conflicts: option

package: option
version: 1
depends: avail

package: avail
version: 1
installed: true

request:
install: inst
upgrade: conf > 1
"""


@pytest.fixture(scope="session")
def scenario_text():
    return UPGRADE_SCENARIO


@pytest.fixture()
def scenario_doc():
    return parse_document(UPGRADE_SCENARIO)


@pytest.fixture()
def scenario_index(scenario_doc):
    return DocIndex(scenario_doc)
