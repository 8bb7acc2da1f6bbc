import { ApiClient } from "./api.js";
import { App } from "./app.js";

const mount = document.getElementById("app");
if (mount) {
    const app = new App(new ApiClient(""), mount);
    void app.start();
}
