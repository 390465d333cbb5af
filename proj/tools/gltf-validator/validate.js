// Usage: node validate.js path/to/scene.gltf
// Exits 1 when the Khronos validator reports any error.
const fs = require('fs');
const path = require('path');
const validator = require('gltf-validator');

const file = process.argv[2];
if (!file) {
  console.error('usage: node validate.js <scene.gltf>');
  process.exit(2);
}
const dir = path.dirname(file);

validator
  .validateBytes(new Uint8Array(fs.readFileSync(file)), {
    uri: path.basename(file),
    externalResourceFunction: (uri) =>
      new Promise((resolve, reject) => {
        fs.readFile(path.join(dir, decodeURIComponent(uri)), (err, data) =>
          err ? reject(err.toString()) : resolve(new Uint8Array(data)));
      }),
  })
  .then((report) => {
    const { numErrors, numWarnings, numInfos, messages } = report.issues;
    for (const m of messages) {
      if (m.severity <= 1) console.log(`${m.severity === 0 ? 'ERROR' : 'WARNING'} ${m.code} ${m.pointer || ''} ${m.message}`);
    }
    console.log(`${numErrors} error(s), ${numWarnings} warning(s), ${numInfos} info(s)`);
    process.exit(numErrors > 0 ? 1 : 0);
  })
  .catch((e) => {
    console.error(String(e));
    process.exit(2);
  });
